import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, mpf, sqrt as mpsqrt

from ringspdc.materials import (
    Material,
    MaterialError,
    ProfileError,
    WavelengthDomainError,
    build_profile,
    interpolate_material,
    layered_profile,
    load_materials,
    sellmeier_index,
)
from ringspdc.constants import wavelength_to_omega


@pytest.fixture(scope="module")
def mats():
    return load_materials()


def mp_sellmeier(terms, lam):
    mp.dps = 40
    lam2 = mpf(lam) ** 2
    n2 = 1 + sum(mpf(b) * lam2 / (lam2 - mpf(r) ** 2) for b, r in terms)
    return float(mpsqrt(n2))


@pytest.mark.parametrize("name", ["silica", "germania", "germanosilicate_19p3"])
@pytest.mark.parametrize("lam", [0.45, 0.775, 1.3, 1.55, 1.95])
def test_index_matches_high_precision_sum(mats, name, lam):
    m = mats[name]
    assert sellmeier_index(m, lam) == pytest.approx(mp_sellmeier(m.sellmeier_terms, lam), rel=1e-14)


def test_silica_reference_values(mats):
    # fused silica, 20 C
    np.testing.assert_allclose(mats["silica"].index([0.775, 1.55]), [1.45376, 1.44402], atol=2e-5)


def test_doped_glass_interpolates_coefficients(mats):
    doped = mats["germanosilicate_19p3"]
    assert doped.dopant_molar_fraction == pytest.approx(0.193)
    b0 = mats["silica"].sellmeier_terms[0][0]
    b1 = mats["germania"].sellmeier_terms[0][0]
    assert doped.sellmeier_terms[0][0] == pytest.approx(b0 + 0.193 * (b1 - b0))
    assert mats["silica"].index(1.55) < doped.index(1.55) < mats["germania"].index(1.55)


@given(st.floats(0.0, 1.0), st.floats(0.5, 1.9))
def test_index_monotone_in_dopant_fraction(frac, lam):
    mats = load_materials()
    lo = interpolate_material(mats["silica"], mats["germania"], frac * 0.5)
    hi = interpolate_material(mats["silica"], mats["germania"], frac * 0.5 + 0.5)
    assert lo.index(lam) <= hi.index(lam)


@settings(max_examples=50)
@given(st.floats(0.5, 1.6), st.floats(1e-3, 0.3))
def test_normal_dispersion_in_band(lam, step):
    silica = load_materials()["silica"]
    assert silica.index(lam) > silica.index(lam + step)


def test_out_of_band_raises(mats):
    with pytest.raises(WavelengthDomainError):
        mats["silica"].index(2.5)
    with pytest.raises(WavelengthDomainError):
        mats["silica"].index(np.array([1.0, 0.3]))
    assert sellmeier_index(mats["silica"], 2.5, check_band=False) > 1


def test_zero_resonance_term_is_constant():
    m = Material("flat", ((1.45**2 - 1, 0.0),))
    np.testing.assert_allclose(m.index([0.5, 1.0, 1.9]), 1.45, rtol=1e-15)


def test_material_validation():
    with pytest.raises(MaterialError):
        Material("bad", ())
    with pytest.raises(MaterialError):
        Material("bad", ((-0.1, 0.1),))
    with pytest.raises(MaterialError):
        Material("bad", ((0.1, 0.1),), 1.5)


def test_materials_file_override(tmp_path, monkeypatch):
    path = tmp_path / "m.ini"
    path.write_text("[glass]\nterms = 1.1 0.1\n[doped]\nbase = glass\ndopant = glass\nfraction = 0.5\n")
    monkeypatch.setenv("RINGSPDC_MATERIALS", str(path))
    mats = load_materials()
    assert set(mats) == {"glass", "doped"}
    assert mats["doped"].index(1.0) == pytest.approx(mats["glass"].index(1.0))


def test_materials_file_errors(tmp_path):
    path = tmp_path / "m.ini"
    path.write_text("[a]\nbase = b\ndopant = a\nfraction = 0.1\n[b]\nbase = a\ndopant = a\nfraction = 0.1\n")
    with pytest.raises(MaterialError, match="circular"):
        load_materials(path)
    path.write_text("[a]\nterms = 1.0\n")
    with pytest.raises(MaterialError):
        load_materials(path)


def test_profile_evaluation(mats):
    prof = layered_profile([4.5, 5.5], [mats["silica"], mats["germanosilicate_19p3"], mats["silica"]])
    assert prof.domain_radius == pytest.approx(16.5)
    ep = build_profile(prof, wavelength_to_omega(1.55))
    np.testing.assert_allclose(ep.index, [mats["silica"].index(1.55),
                                          mats["germanosilicate_19p3"].index(1.55),
                                          mats["silica"].index(1.55)])
    assert ep.eps_at(np.array([1.0, 5.0, 7.0])).tolist() == [ep.eps[0], ep.eps[1], ep.eps[2]]


def test_profile_errors(mats):
    s = mats["silica"]
    with pytest.raises(ProfileError):
        layered_profile([4.5], [s])
    with pytest.raises(ProfileError):
        layered_profile([5.5, 4.5], [s, s, s])
    with pytest.raises(ProfileError):
        layered_profile([4.5], [s, s], domain_radius=4.0)
