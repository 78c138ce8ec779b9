import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ringspdc.constants import wavelength_to_omega
from ringspdc.oam import ModeKey
from ringspdc.qpm import (
    GratingWarning,
    NoGratingNeeded,
    NotGuidedError,
    PolingGrating,
    ProcessSpec,
    _family_roots,
    delta_beta_scan,
    design_period,
    grating_spectrum,
    grating_spectrum_quadrature,
    main_lobe_fwhm,
    phase_mismatch,
    process_separation,
    selection_allowed,
    tensor_charges,
)
from ringspdc.materials import build_profile

# half width of sinc^2 at half maximum, in units of its argument
SINC2_HALF = 1.3915573782515103


def test_tensor_and_charges():
    g = PolingGrating(42.9)
    t = g.tensor()
    assert t[0, 0, 0] == pytest.approx(3.0)
    assert t[0, 1, 1] == t[1, 0, 1] == t[1, 1, 0] == 1.0
    assert t[1, 0, 0] == t[0, 0, 1] == t[0, 1, 0] == t[1, 1, 1] == 0.0
    assert tensor_charges(t) == [-1, 1]


def test_isotropic_tensor_charges():
    # chi_xxx = 3 chi_xyy is the isotropic-glass ratio; any other ratio adds charge -+3
    with pytest.warns(GratingWarning):
        t = PolingGrating(42.9, chi_xxx=0.05).tensor()
    assert tensor_charges(t) == [-3, -1, 1, 3]


def test_chi_ratio_warning():
    with pytest.warns(GratingWarning):
        PolingGrating(42.9, chi_xxx=0.05)


def test_grating_validation():
    for kwargs in ({"period": 0}, {"period": 40, "length": -1}, {"period": 40, "duty": 1.0},
                   {"period": 40, "profile": "sine"}, {"period": 40, "chi_xyy": 0.0}):
        with pytest.raises(ValueError):
            PolingGrating(**kwargs)


@pytest.mark.parametrize("length", [0.01, 0.1, 1.0])
def test_first_order_peak_height(length):
    g = PolingGrating(42.9, length)
    z = grating_spectrum(g, 2 * np.pi / 42.9)
    # first Fourier coefficient of a 50 % on/off pattern is 1/pi
    assert abs(z) == pytest.approx(g.chi0 * length / np.pi, rel=1e-3)


@pytest.mark.parametrize("length", [0.01, 0.1, 1.0])
def test_main_lobe_width(length):
    g = PolingGrating(42.9, length)
    expected = 4 * SINC2_HALF / (length * 1e6)
    assert main_lobe_fwhm(g) == pytest.approx(expected, rel=1e-3)


def test_uniform_profile_is_sinc():
    g = PolingGrating(42.9, 0.001, profile="uniform")
    q = np.linspace(-0.02, 0.02, 11)
    z = grating_spectrum(g, q)
    np.testing.assert_allclose(np.abs(z), g.chi0 * 1e-6 * 1000 * np.abs(np.sinc(q * 1000 / (2 * np.pi))),
                               rtol=1e-12, atol=1e-30)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.3, 0.3), st.floats(1e-3, 2e-3), st.floats(0.2, 0.8))
def test_closed_form_matches_quadrature(q, length, duty):
    # non-integer numbers of periods exercise the remainder segment
    g = PolingGrating(42.9, length, duty=duty)
    closed = grating_spectrum(g, q)
    quad = grating_spectrum_quadrature(g, q, panels=20000)[0]
    scale = g.chi0 * 1e-6 * g.length_um
    assert abs(closed - quad) < 1e-9 * scale


@given(st.floats(-1.0, 1.0), st.floats(1e-3, 1.0))
def test_spectrum_symmetry_and_bound(q, length):
    g = PolingGrating(42.9, length)
    a, b = grating_spectrum(g, q), grating_spectrum(g, -q)
    assert abs(a) == pytest.approx(abs(b), rel=1e-9, abs=1e-30)
    starts, ends = g.on_intervals()
    assert abs(a) <= g.chi0 * 1e-6 * np.sum(ends - starts) * (1 + 1e-9)


def test_process_parsing_and_rules():
    p = ProcessSpec.parse("HE21_R -> HE21_R + HE11_R")
    assert p.label == "HE21_R->HE21_R+HE11_R"
    assert p.allowed and p.oam_conserved
    te = ProcessSpec.parse("HE21_R -> TE01 + HE11_R")
    assert te.allowed and not te.oam_conserved
    assert not ProcessSpec.parse("HE21_R -> HE11_R + HE11_R").allowed
    assert p.swapped().signal == ModeKey.parse("HE11_R")
    with pytest.raises(ValueError):
        ProcessSpec.parse("HE21_R => HE21_R")


@given(st.sampled_from(["HE11", "HE21", "HE31", "EH11", "TE01", "TM01"]),
       st.sampled_from(["HE11", "HE21", "HE31", "EH11", "TE01", "TM01"]),
       st.sampled_from(["HE11", "HE21", "HE31", "EH11", "TE01", "TM01"]),
       st.sampled_from("RL"), st.sampled_from("RL"), st.sampled_from("RL"))
def test_selection_rule_mirror_symmetry(a, b, c, ha, hb, hc):
    def key(label, hand):
        return ModeKey.parse(label if label[:2] in ("TE", "TM") else f"{label}_{hand}")

    def mirror(k):
        return k if k.handedness == "none" else ModeKey(k.family, k.n, k.m, "L" if k.handedness == "R" else "R")

    p, s, i = key(a, ha), key(b, hb), key(c, hc)
    assert selection_allowed(p, s, i) == selection_allowed(mirror(p), mirror(s), mirror(i))


class _FlatCache:
    omega_p = float(wavelength_to_omega(0.775))

    def pump_beta(self, key):
        return 12.0

    def beta(self, key, omega):
        return 6.0 * np.ones_like(omega)


def test_no_grating_needed():
    p = ProcessSpec.parse("HE21_R -> HE21_R + HE11_R")
    with pytest.raises(NoGratingNeeded):
        design_period(p, 1.5, _FlatCache())


class _LinearCache:
    """beta = n omega / c for every mode: a medium without any dispersion."""
    omega_p = float(wavelength_to_omega(0.775))
    index = 1.45

    def beta(self, key, omega):
        return self.index * np.asarray(omega) / float(wavelength_to_omega(2 * np.pi))

    def pump_beta(self, key):
        return self.beta(key, self.omega_p)


def test_dispersionless_medium_has_zero_mismatch():
    procs = [ProcessSpec.parse(t) for t in ("HE21_R -> HE21_R + HE21_R", "HE11_R -> HE11_R + HE11_L")]
    lam = np.linspace(1.3, 1.8, 51)
    rows = delta_beta_scan(procs, lam, _LinearCache())
    np.testing.assert_allclose([r["delta_beta_rad_per_um"] for r in rows], 0, atol=1e-12)
    with pytest.raises(NoGratingNeeded):
        design_period(procs[0], 1.5, _LinearCache())


def test_design_period(ref_setup):
    p = ProcessSpec.parse("HE21_R -> HE21_R + HE11_R")
    cache = ref_setup.cache
    db = float(phase_mismatch(p, 1.5, cache))
    assert db > 0
    lam1 = design_period(p, 1.5, cache)
    assert lam1 == pytest.approx(2 * np.pi / db)
    assert design_period(p, 1.5, cache, order=3) == pytest.approx(3 * lam1)
    with pytest.raises(ValueError):
        design_period(p, 1.5, cache, order=2)


def test_dispersion_table_spot_resolve(ref_setup):
    cache = ref_setup.cache
    profile = ref_setup.profile
    for label in ("HE21_R", "HE11_R", "TE01"):
        table = cache.table(label)
        key = ModeKey.parse(label)
        for k in (10, 777, 1500):
            w = 0.5 * (table.omega[k] + table.omega[k + 1])
            b, _ = _family_roots(build_profile(profile, w), w, key, cache.settings)
            assert abs(table(w) - b) < 1e-9


def test_table_range_and_group_index(ref_setup):
    table = ref_setup.cache.table("HE21_R")
    lo, hi = table.omega_range
    with pytest.raises(NotGuidedError):
        table(hi * 1.01)
    ng = table.group_index(0.5 * (lo + hi))
    assert 1.45 < ng < 1.5


def test_separation_rows(ref_setup):
    procs = ref_setup.config.processes()
    rows = process_separation(procs, ref_setup.grating, (1.49, 1.51), ref_setup.cache)
    assert [r["process"] for r in rows] == [p.label for p in procs[1:]]
    for r in rows:
        assert 0 <= r["ratio"] < 1e-2
        assert not r["overlapping"]
        assert r["target_peak_lambda_um"] == pytest.approx(1.5, abs=1e-4)


def test_short_grating_processes_overlap(ref_setup):
    procs = ref_setup.config.processes()
    g = ref_setup.grating.with_length(1e-3)
    rows = process_separation(procs, g, (1.49, 1.51), ref_setup.cache)
    assert max(r["ratio"] for r in rows) > 0.5
