"""Cylinder functions used by the layered-fiber solvers.

Thin wrappers over :mod:`scipy.special` returning value and x-derivative pairs.
The modified functions are also offered in exponentially scaled form so that
layer bases can be normalized without overflow.  A bundled high-precision table
(``data/bessel_reference.csv``) backs the accuracy check run by ``validate``.
"""

from importlib import resources
from pathlib import Path
import csv

import numpy as np
from scipy import special as sp


def jn(nu, x):
    """J_nu(x) and J_nu'(x)."""
    return sp.jv(nu, x), sp.jvp(nu, x)


def yn(nu, x):
    return sp.yv(nu, x), sp.yvp(nu, x)


def in_scaled(nu, x):
    """exp(-x) I_nu(x) and exp(-x) I_nu'(x) for x >= 0."""
    v = sp.ive(nu, x)
    d = 0.5 * (sp.ive(nu - 1, x) + sp.ive(nu + 1, x))
    return v, d


def kn_scaled(nu, x):
    """exp(x) K_nu(x) and exp(x) K_nu'(x) for x > 0."""
    v = sp.kve(nu, x)
    d = -0.5 * (sp.kve(nu - 1, x) + sp.kve(nu + 1, x))
    return v, d


_EVALUATORS = {
    "J": lambda n, x: sp.jv(n, x),
    "Y": lambda n, x: sp.yv(n, x),
    "I": lambda n, x: sp.iv(n, x),
    "K": lambda n, x: sp.kv(n, x),
}


def reference_table_path():
    return Path(str(resources.files("ringspdc") / "data" / "bessel_reference.csv"))


def load_reference_table(path=None):
    """Rows of ``(kind, order, x, value)`` from the bundled reference table."""
    path = Path(path) if path is not None else reference_table_path()
    rows = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(line for line in fh if not line.startswith("#")):
            rows.append((row["kind"], int(row["order"]), float(row["x"]), float(row["value"])))
    return rows


def check_reference_table(path=None, rtol=1e-12):
    """Compare the wrapped functions against the reference table.

    Returns ``(worst_relative_error, failures)`` where `failures` lists the rows
    outside `rtol`.
    """
    worst = 0.0
    failures = []
    for kind, order, x, ref in load_reference_table(path):
        got = float(_EVALUATORS[kind](order, x))
        err = abs(got - ref) / max(abs(ref), 1e-300)
        worst = max(worst, err)
        if not err <= rtol:
            failures.append((kind, order, x, ref, got, err))
    return worst, failures


def cylinder_values(kind, nu, x):
    return np.asarray(_EVALUATORS[kind](nu, x))
