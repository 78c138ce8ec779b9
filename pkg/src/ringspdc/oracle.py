"""Independent reference solvers used by the tests and ``ringspdc validate``.

Nothing here shares code with :mod:`ringspdc.modes` except the cylinder
functions themselves.

* :func:`two_layer_reference` solves the classical single-interface
  characteristic equations of a step fiber (exact vector theory).
* :func:`fd_radial_modes` discretizes the scalar radial wave equation with
  second-order central differences and solves the resulting symmetric
  tridiagonal eigenproblem.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special as sp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .constants import k0_per_um
from .materials import build_profile


@dataclass(frozen=True)
class FdGrid:
    r_max: float
    points: int

    def __post_init__(self):
        if self.points < 500:
            raise ValueError(f"finite-difference grid needs >= 500 points, got {self.points}")
        if self.r_max <= 0:
            raise ValueError("r_max must be positive")

    @property
    def spacing(self):
        return self.r_max / self.points


def _cell_permittivity(boundaries, eps, faces):
    """Area-averaged permittivity of each annular cell between consecutive faces."""
    edges = np.concatenate([[0.0], boundaries, [np.inf]])
    out = np.zeros(len(faces) - 1)
    for k in range(len(eps)):
        lo = np.clip(faces[:-1], edges[k], edges[k + 1])
        hi = np.clip(faces[1:], edges[k], edges[k + 1])
        out += eps[k] * (hi**2 - lo**2)
    return out / (faces[1:] ** 2 - faces[:-1] ** 2)


def fd_radial_modes(profile, omega, n, grid):
    """Guided beta values of the scalar radial equation, descending.

    Cell-centred nodes ``r_i = (i + 1/2) h`` with a zero-flux face at the axis
    and a Dirichlet wall on the face at ``grid.r_max`` (antisymmetric ghost
    node).  Layer boundaries falling on cell faces keep the scheme second
    order; otherwise cells straddling a boundary use the area-averaged
    permittivity.  The scalar order `n` is the LP azimuthal order, so the
    fundamental HE11 corresponds to ``n = 0``.
    """
    if grid.r_max < getattr(profile, "domain_radius", 0.0):
        raise ValueError("grid must extend to at least the profile domain radius")
    ep = build_profile(profile, omega)
    k0 = k0_per_um(omega)
    h = grid.spacing
    faces = h * np.arange(grid.points + 1)
    r = 0.5 * (faces[:-1] + faces[1:])
    eps = _cell_permittivity(ep.boundaries, ep.eps, faces)

    # symmetrized form of (1/r)(r f')' - n^2 f / r^2 + k0^2 eps f = beta^2 f
    diag = -(faces[1:] + faces[:-1]) / (h * h * r) - n * n / r**2 + k0**2 * eps
    diag[-1] -= faces[-1] / (h * h * r[-1])
    off = faces[1:-1] / (h * h * np.sqrt(r[:-1] * r[1:]))
    floor = k0**2 * ep.eps[-1]
    top = k0**2 * ep.eps.max()
    if top <= floor:
        return []
    vals = eigh_tridiagonal(diag, off, eigvals_only=True, select="v", select_range=(floor, top))
    vals = vals[vals > floor]
    return list(np.sqrt(np.sort(vals)[::-1]))


def _hybrid(nu, u, w, n1, n2, bk):
    j, jd = sp.jv(nu, u), sp.jvp(nu, u)
    kr = sp.kvp(nu, w) / (w * sp.kv(nu, w))
    lhs = (jd + u * j * kr) * (n1**2 * jd + n2**2 * u * j * kr)
    rhs = (nu * bk) ** 2 * (1 / u**2 + 1 / w**2) ** 2 * (u * j) ** 2
    return lhs - rhs


def _te(u, w):
    return w * sp.j1(u) * sp.k0(w) + u * sp.j0(u) * sp.k1(w)


def _tm(u, w, n1, n2):
    return n1**2 * w * sp.j1(u) * sp.k0(w) + n2**2 * u * sp.j0(u) * sp.k1(w)


def _roots(f, v, samples):
    u = np.linspace(v * 1e-6, v * (1 - 1e-9), samples)
    with np.errstate(all="ignore"):
        vals = f(u)
    out = []
    for a, b, fa, fb in zip(u[:-1], u[1:], vals[:-1], vals[1:]):
        if np.isfinite(fa) and np.isfinite(fb) and np.sign(fa) != np.sign(fb):
            out.append(brentq(f, a, b, xtol=1e-15, rtol=1e-15))
    return out


def two_layer_reference(core_index, clad_index, core_radius, wavelength, n, samples=20000,
                        labelled=False):
    """Propagation constants (rad/um) of a step fiber from its characteristic equations.

    For ``n = 0`` both TE and TM roots are returned.  With ``labelled=True`` the
    result is a list of ``(label, beta)`` where label is ``"TE"``, ``"TM"`` or
    ``"hybrid"``.
    """
    if core_index <= clad_index:
        return []
    k = 2 * np.pi / wavelength
    v = k * core_radius * np.sqrt(core_index**2 - clad_index**2)

    def beta_of(u):
        return np.sqrt((k * core_index) ** 2 - (u / core_radius) ** 2)

    def w_of(u):
        return np.sqrt(np.maximum(v * v - u * u, 0.0))

    found = []
    if n == 0:
        for u in _roots(lambda u: _te(u, w_of(u)), v, samples):
            found.append(("TE", beta_of(u)))
        for u in _roots(lambda u: _tm(u, w_of(u), core_index, clad_index), v, samples):
            found.append(("TM", beta_of(u)))
    else:
        def f(u):
            return _hybrid(n, u, w_of(u), core_index, clad_index, beta_of(u) / k)

        for u in _roots(f, v, samples):
            found.append(("hybrid", beta_of(u)))
    found.sort(key=lambda t: -t[1])
    if labelled:
        return found
    return [b for _, b in found]


def normalized_frequency(core_index, clad_index, core_radius, wavelength):
    return 2 * np.pi / wavelength * core_radius * np.sqrt(core_index**2 - clad_index**2)
