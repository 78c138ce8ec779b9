import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp, besseli, besselj, besselk, bessely, diff, exp as mpexp

from ringspdc import special


def test_reference_table_within_tolerance():
    worst, failures = special.check_reference_table(rtol=1e-12)
    assert failures == []
    assert worst < 1e-12


def test_corrupted_table_is_detected(tmp_path):
    text = special.reference_table_path().read_text().splitlines()
    header = [line for line in text if line.startswith("#") or line.startswith("kind")]
    body = [line for line in text if line not in header]
    kind, order, x, value = body[0].split(",")
    body[0] = ",".join([kind, order, x, repr(float(value) * (1 + 1e-9))])
    bad = tmp_path / "bad.csv"
    bad.write_text("\n".join(header + body) + "\n")
    worst, failures = special.check_reference_table(bad, rtol=1e-12)
    assert len(failures) == 1
    assert worst == pytest.approx(1e-9, rel=1e-3)


@settings(max_examples=60)
@given(st.integers(0, 5), st.floats(0.05, 60.0))
def test_scaled_modified_functions(nu, x):
    mp.dps = 30
    i, di = special.in_scaled(nu, x)
    k, dk = special.kn_scaled(nu, x)
    assert i == pytest.approx(float(besseli(nu, x) * mpexp(-x)), rel=1e-12)
    assert k == pytest.approx(float(besselk(nu, x) * mpexp(x)), rel=1e-12)
    assert di == pytest.approx(float(diff(lambda t: besseli(nu, t), x) * mpexp(-x)), rel=1e-11, abs=1e-300)
    assert dk == pytest.approx(float(diff(lambda t: besselk(nu, t), x) * mpexp(x)), rel=1e-11)


@settings(max_examples=60)
@given(st.integers(0, 5), st.floats(0.1, 40.0))
def test_oscillatory_functions_and_wronskian(nu, x):
    mp.dps = 30
    j, dj = special.jn(nu, x)
    y, dy = special.yn(nu, x)
    assert j == pytest.approx(float(besselj(nu, x)), rel=1e-10, abs=1e-13)
    assert y == pytest.approx(float(bessely(nu, x)), rel=1e-10, abs=1e-13)
    # J Y' - J' Y = 2 / (pi x)
    assert j * dy - dj * y == pytest.approx(2 / (np.pi * x), rel=1e-10)
