import numpy as np
import pytest
from hypothesis import given, strategies as st

from ringspdc.constants import wavelength_to_omega
from ringspdc.modes import find_modes
from ringspdc.oam import (
    AmbiguousWindingError,
    IncompatibleConstituentsError,
    ModeKey,
    circular_combination,
    oam_mode,
    winding_from_samples,
    winding_number,
)

W155 = float(wavelength_to_omega(1.55))
W775 = float(wavelength_to_omega(0.775))


@pytest.fixture(scope="module")
def modes(ref_profile):
    out = {}
    for w in (W775, W155):
        for nu in range(4):
            for m in find_modes(ref_profile, w, nu):
                out[(m.label, w)] = m
    return out


@pytest.mark.parametrize("text, family, n, m, hand, j, l", [
    ("HE21_R", "HE", 2, 1, "R", 2, 1),
    ("HE21_L", "HE", 2, 1, "L", -2, -1),
    ("HE11R", "HE", 1, 1, "R", 1, 0),
    ("EH11_L", "EH", 1, 1, "L", -1, -2),
    ("HE31_R", "HE", 3, 1, "R", 3, 2),
    ("TE01", "TE", 0, 1, "none", 0, 0),
])
def test_mode_keys(text, family, n, m, hand, j, l):
    k = ModeKey.parse(text)
    assert (k.family, k.n, k.m, k.handedness) == (family, n, m, hand)
    assert k.total_angular_momentum == j
    assert k.winding_number == l
    assert ModeKey.parse(k.label) == k


@pytest.mark.parametrize("bad", ["XX21", "HE21", "TE01_R", "HE01_R", "HE20_R", ""])
def test_bad_mode_keys(bad):
    with pytest.raises(ValueError):
        ModeKey.parse(bad)


@pytest.mark.parametrize("label, w", [("HE11", W155), ("HE21", W155), ("HE31", W155),
                                      ("EH11", W775), ("EH21", W775)])
def test_measured_winding_matches_key(modes, label, w):
    for hand in ("R", "L"):
        om = oam_mode(modes[(label, w)], hand)
        assert winding_number(om) == om.winding_number == om.key.winding_number


def test_reference_winding_values(modes):
    assert winding_number(oam_mode(modes[("HE21", W155)], "R")) == 1
    assert winding_number(oam_mode(modes[("HE21", W155)], "L")) == -1
    assert winding_number(oam_mode(modes[("HE11", W155)], "R")) == 0
    assert winding_number(oam_mode(modes[("EH11", W775)], "R")) == 2


@pytest.mark.parametrize("label", ["TE01", "TM01"])
def test_te_tm_winding_is_ambiguous(modes, label):
    om = oam_mode(modes[(label, W155)])
    assert om.winding_number == 0
    with pytest.raises(AmbiguousWindingError):
        winding_number(om)


def test_oam_modes_carry_unit_power(modes):
    for (label, w), m in modes.items():
        hands = ("none",) if m.n == 0 else ("R", "L")
        for h in hands:
            assert oam_mode(m, h).power() == pytest.approx(1.0, abs=1e-6)


def test_single_harmonic_and_mirror(modes):
    m = modes[("HE21", W155)]
    (jr, wr, fr), = oam_mode(m, "R").harmonics()
    (jl, wl, fl), = oam_mode(m, "L").harmonics()
    assert (jr, jl) == (2, -2)
    assert abs(wr) == pytest.approx(1.0) and abs(wl) == pytest.approx(1.0)
    np.testing.assert_array_equal(fl["e_theta"], -fr["e_theta"])
    np.testing.assert_array_equal(fl["e_r"], fr["e_r"])


def test_field_grid_matches_harmonics(modes):
    om = oam_mode(modes[("HE21", W155)], "R")
    theta = np.linspace(0, 2 * np.pi, 16, endpoint=False)
    g = om.field_grid(theta)
    (j, w, f), = om.harmonics()
    np.testing.assert_allclose(g["e_r"], w * f["e_r"][:, None] * np.exp(1j * j * theta)[None, :],
                               atol=1e-9 * np.max(np.abs(f["e_r"])))


def test_incompatible_constituents(modes):
    he21 = modes[("HE21", W155)]
    he31 = modes[("HE31", W155)]
    with pytest.raises(IncompatibleConstituentsError):
        circular_combination(he21.with_parity("even"), he31.with_parity("odd"), "R")
    with pytest.raises(IncompatibleConstituentsError):
        circular_combination(he21.with_parity("even"), he21.with_parity("even"), "R")
    with pytest.raises(IncompatibleConstituentsError):
        circular_combination(he21.with_parity("even"))
    with pytest.raises(IncompatibleConstituentsError):
        circular_combination(modes[("TE01", W155)], handedness="R")
    with pytest.raises(ValueError):
        circular_combination(*he21.parity_pair(), handedness="X")


@given(st.integers(-6, 6), st.sampled_from([1, -1]), st.floats(0, 2 * np.pi))
def test_winding_of_synthetic_vortex(l, spin, phase):
    theta = 2 * np.pi * np.arange(128) / 128
    amp = np.exp(1j * (l * theta + phase))
    # spin +1 component is (ex - i ey)/sqrt(2)
    ex = amp / np.sqrt(2)
    ey = (1j if spin == 1 else -1j) * amp / np.sqrt(2)
    assert winding_from_samples(ex, ey) == l


def test_synthetic_ambiguity():
    theta = 2 * np.pi * np.arange(64) / 64
    with pytest.raises(AmbiguousWindingError):
        winding_from_samples(np.cos(theta), np.sin(theta) * 0)
