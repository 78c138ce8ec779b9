import numpy as np
import pytest

from ringspdc.constants import wavelength_to_omega
from ringspdc.modes import find_modes
from ringspdc.oracle import FdGrid, fd_radial_modes, normalized_frequency, two_layer_reference

from conftest import constant
from ringspdc.materials import layered_profile

W155 = float(wavelength_to_omega(1.55))


def test_grid_validation():
    with pytest.raises(ValueError):
        FdGrid(10.0, 100)
    with pytest.raises(ValueError):
        FdGrid(-1.0, 1000)


def test_fixture_is_weakly_guiding():
    v = normalized_frequency(1.45, 1.445, 6.0, 1.55)
    assert 2.8 < v < 3.0


def test_weak_guidance_scalar_limit():
    prof = layered_profile([6.0], [constant(1.45), constant(1.445)], 48.0)
    fd = fd_radial_modes(prof, W155, 0, FdGrid(48.0, 4000))
    he11 = two_layer_reference(1.45, 1.445, 6.0, 1.55, 1)[0]
    assert abs(fd[0] - he11) / he11 < 1e-5
    # LP11 sits between the TE01/TM01/HE21 group
    lp11 = fd_radial_modes(prof, W155, 1, FdGrid(48.0, 4000))[0]
    group = two_layer_reference(1.45, 1.445, 6.0, 1.55, 0) + two_layer_reference(1.45, 1.445, 6.0, 1.55, 2)
    assert abs(lp11 - np.mean(group)) / lp11 < 1e-5


def test_second_order_convergence():
    # boundary on a cell face for every grid
    prof = layered_profile([6.0], [constant(1.45), constant(1.445)], 24.0)
    b = [fd_radial_modes(prof, W155, 0, FdGrid(24.0, n))[0] for n in (500, 1000, 2000)]
    ratio = (b[1] - b[0]) / (b[2] - b[1])
    assert ratio == pytest.approx(4.0, rel=0.05)


def test_ring_scalar_gap(ref_profile):
    he11 = find_modes(ref_profile, W155, 1, 1)[0]
    fd = fd_radial_modes(ref_profile, W155, 0, FdGrid(ref_profile.domain_radius, 4000))
    assert abs(fd[0] - he11.beta) / he11.beta < 1e-3


def test_no_guidance_without_contrast():
    prof = layered_profile([6.0], [constant(1.445), constant(1.445)])
    assert fd_radial_modes(prof, W155, 0, FdGrid(18.0, 1000)) == []
    assert two_layer_reference(1.445, 1.445, 6.0, 1.55, 1) == []


def test_labelled_roots():
    labels = [lab for lab, _ in two_layer_reference(1.45, 1.445, 6.0, 1.55, 0, labelled=True)]
    assert labels == ["TE", "TM"]
