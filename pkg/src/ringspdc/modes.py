"""Guided modes of a layered step-index fiber by a Bessel transfer-matrix method.

Inside every annulus the axial fields are combinations of two cylinder
functions: J/Y where the layer is oscillatory (``eps k0^2 > beta^2``) and I/K
where it is evanescent.  Matching ``Ez, Hz, E_theta, H_theta`` at each of the N
interior boundaries gives a real 4N x 4N system whose row-normalized
determinant vanishes exactly at the propagation constants.

Field convention
----------------
A mode is stored as its ``exp(+i n theta)`` harmonic with radial profiles
``e_r, e_theta, e_z, h_r, h_theta, h_z`` (h is scaled by the vacuum impedance,
``h = Z0 H``, so both share V/m).  The harmonic carries 1 W of axial Poynting
flux.  Even and odd parities are ``(M+ + M-)/sqrt(2)`` and
``(M+ - M-)/(sqrt(2) i)`` where ``M-`` is the mirror image with
``exp(-i n theta)``; each parity also carries 1 W.

Family labels
-------------
``n = 0`` roots are TE (E_z identically zero) or TM (H_z identically zero).
For ``n >= 1`` the harmonic is split into circular polarization components;
HE modes have the dominant component co-rotating with the phase winding, EH
modes counter-rotating.  Radial indices count roots of one family at fixed n in
order of decreasing beta (HE21, EH21, HE22, ...).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from .constants import CONSTANTS, UM, k0_per_um, omega_to_wavelength
from .materials import build_profile
from .special import in_scaled, jn, kn_scaled, yn

FAMILIES = ("HE", "EH", "TE", "TM")
COMPONENTS = ("e_r", "e_theta", "e_z", "h_r", "h_theta", "h_z")


class GuidanceDomainError(ValueError):
    """beta outside the open guidance interval, or an invalid azimuthal order."""


class ModeFinalizationError(RuntimeError):
    """Root whose null vector carries no power."""


class DegeneracyWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SolverSettings:
    scan_points: int = 2000
    refine_points: int = 24
    beta_tol: float = 1e-12
    radial_points: int = 2000
    panel_order: int = 16
    tail_points: int = 160
    edge_gap: float = 1e-9


DEFAULT_SETTINGS = SolverSettings()


# ---------------------------------------------------------------------------
# radial quadrature


@dataclass(frozen=True, eq=False)
class RadialQuadrature:
    """Gauss-Legendre panels aligned with layer boundaries plus a mapped tail.

    ``weights`` integrate ``f(r) dr``; callers multiply by ``r`` themselves.
    The tail maps ``[domain_radius, inf)`` onto ``[0, 1)`` so decaying cladding
    fields are integrated to infinity.
    """

    nodes: np.ndarray
    weights: np.ndarray
    boundaries: np.ndarray
    domain_radius: float

    def integrate(self, values):
        return np.tensordot(self.weights * self.nodes, values, axes=(0, 0))


def radial_quadrature(boundaries, domain_radius, n_points=2000, order=16, tail_points=160):
    boundaries = np.asarray(boundaries, dtype=float)
    edges = np.concatenate([[0.0], boundaries, [domain_radius]])
    lengths = np.diff(edges)
    budget = max(n_points - tail_points, order * len(lengths))
    x, w = np.polynomial.legendre.leggauss(order)
    nodes, weights = [], []
    for a, b, length in zip(edges[:-1], edges[1:], lengths):
        panels = max(1, int(round(budget * length / lengths.sum() / order)))
        cuts = np.linspace(a, b, panels + 1)
        for p, q in zip(cuts[:-1], cuts[1:]):
            nodes.append(0.5 * (q - p) * x + 0.5 * (q + p))
            weights.append(0.5 * (q - p) * w)
    xt, wt = np.polynomial.legendre.leggauss(tail_points)
    t = 0.5 * (xt + 1.0)
    scale = domain_radius - boundaries[-1]
    nodes.append(domain_radius + scale * t / (1.0 - t))
    weights.append(0.5 * wt * scale / (1.0 - t) ** 2)
    return RadialQuadrature(
        np.concatenate(nodes), np.concatenate(weights), boundaries, float(domain_radius)
    )


# ---------------------------------------------------------------------------
# layer bases


def _regular(nu, q, osc, r, r_ref):
    """J (oscillatory) or I (evanescent), normalized by its value/slope at r_ref."""
    x, xr = q * r, q * r_ref
    jv, jd = jn(nu, x)
    jr, jrd = jn(nu, xr)
    iv, idv = in_scaled(nu, x)
    ir, ird = in_scaled(nu, xr)
    nj = np.hypot(jr, jrd)
    ni = np.hypot(ir, ird)
    grow = np.exp(np.where(osc, 0.0, x - xr))
    f = np.where(osc, jv / nj, iv / ni * grow)
    df = q * np.where(osc, jd / nj, idv / ni * grow)
    return f, df


def _singular(nu, q, osc, r, r_ref):
    """Y (oscillatory) or K (evanescent), normalized at r_ref."""
    x, xr = q * r, q * r_ref
    yv_, yd = yn(nu, x)
    yr, yrd = yn(nu, xr)
    kv, kd = kn_scaled(nu, x)
    kr, krd = kn_scaled(nu, xr)
    ny = np.hypot(yr, yrd)
    nk = np.hypot(kr, krd)
    decay = np.exp(np.where(osc, 0.0, -(x - xr)))
    f = np.where(osc, yv_ / ny, kv / nk * decay)
    df = q * np.where(osc, yd / ny, kd / nk * decay)
    return f, df


class _Layout:
    """Column bookkeeping: which basis functions each region contributes."""

    def __init__(self, boundaries):
        self.boundaries = np.asarray(boundaries, dtype=float)
        self.n_boundaries = len(self.boundaries)
        self.size = 4 * self.n_boundaries
        self.columns = []  # per region: list of (col, field 'a'|'b', basis 'reg'|'sing')
        col = 0
        for k in range(self.n_boundaries + 1):
            bases = []
            if k < self.n_boundaries:
                bases.append("reg")
            if k > 0:
                bases.append("sing")
            entries = []
            for fieldname in ("a", "b"):
                for basis in bases:
                    entries.append((col, fieldname, basis))
                    col += 1
            self.columns.append(entries)
        assert col == self.size

    def refs(self, k):
        """Normalization radii (regular, singular) for region k."""
        b = self.boundaries
        reg = b[k] if k < self.n_boundaries else None
        sing = b[k - 1] if k > 0 else None
        return reg, sing

    def basis(self, k, which, nu, q, osc, r):
        reg_ref, sing_ref = self.refs(k)
        if which == "reg":
            return _regular(nu, q, osc, r, reg_ref)
        return _singular(nu, q, osc, r, sing_ref)


def _region_wavenumbers(eps, k0, beta):
    """kappa^2 = eps k0^2 - beta^2 per region, with |kappa| and the oscillatory mask."""
    kappa2 = eps[None, :] * k0**2 - beta[:, None] ** 2
    return kappa2, np.sqrt(np.abs(kappa2)), kappa2 > 0


def _check_domain(ep, nu, beta):
    if nu < 0 or int(nu) != nu:
        raise GuidanceDomainError(f"azimuthal order must be a non-negative integer, got {nu}")
    k0 = k0_per_um(ep.omega)
    lo, hi = k0 * np.sqrt(ep.eps[-1]), k0 * np.sqrt(ep.eps.max())
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    if np.any(beta <= lo) or np.any(beta >= hi):
        raise GuidanceDomainError(
            f"beta outside guidance interval ({lo:.9g}, {hi:.9g}) rad/um"
        )
    return k0, beta


def system_matrix(ep, nu, beta):
    """Boundary-matching matrices, shape ``(len(beta), 4N, 4N)``.

    Rows per boundary: ``Ez, Hz/i, E_theta, H_theta/i`` (all real in this gauge).
    """
    k0, beta = _check_domain(ep, nu, beta)
    layout = _Layout(ep.boundaries)
    kappa2, q, osc = _region_wavenumbers(ep.eps, k0, beta)
    nb = len(beta)
    m = np.zeros((nb, layout.size, layout.size))
    with np.errstate(all="ignore"):
        for i, rb in enumerate(layout.boundaries):
            for k, sign in ((i, 1.0), (i + 1, -1.0)):
                k2, qk, ok = kappa2[:, k], q[:, k], osc[:, k]
                eps = ep.eps[k]
                for col, fieldname, which in layout.columns[k]:
                    f, df = layout.basis(k, which, nu, qk, ok, rb)
                    if fieldname == "a":
                        m[:, 4 * i + 0, col] = sign * f
                        m[:, 4 * i + 2, col] = sign * (-nu * beta / (k2 * rb)) * f
                        m[:, 4 * i + 3, col] = sign * (k0 * eps / k2) * df
                    else:
                        m[:, 4 * i + 1, col] = sign * f
                        m[:, 4 * i + 2, col] = sign * (k0 / k2) * df
                        m[:, 4 * i + 3, col] = sign * (-nu * beta / (k2 * rb)) * f
    return m


def _normalized_det(m):
    norms = np.linalg.norm(m, axis=2)
    with np.errstate(all="ignore"):
        return np.linalg.det(m / norms[:, :, None])


def dispersion_determinant(profile, omega, nu, beta):
    """Row-normalized boundary-matching determinant.

    `profile` may be a :class:`RadialPermittivityProfile` or an already
    evaluated profile.  Scalar `beta` gives a float, arrays give arrays.
    The value lies in [-1, 1] and vanishes exactly at guided-mode roots.
    """
    ep = _evaluated(profile, omega)
    scalar = np.ndim(beta) == 0
    d = _normalized_det(system_matrix(ep, nu, beta))
    return float(d[0]) if scalar else d


def _evaluated(profile, omega):
    if hasattr(profile, "eps") and hasattr(profile, "boundaries") and hasattr(profile, "omega"):
        return profile
    return build_profile(profile, omega)


def guidance_interval(ep):
    k0 = k0_per_um(ep.omega)
    return k0 * np.sqrt(ep.eps[-1]), k0 * np.sqrt(ep.eps.max())


# ---------------------------------------------------------------------------
# root search


def _scan_segments(ep, n_points, gap):
    """Split the guidance interval at every layer threshold beta = k0 n_k."""
    lo, hi = guidance_interval(ep)
    k0 = k0_per_um(ep.omega)
    cuts = np.unique(np.concatenate([[lo, hi], k0 * np.sqrt(ep.eps)]))
    cuts = cuts[(cuts >= lo) & (cuts <= hi)]
    segs = []
    total = hi - lo
    for a, b in zip(cuts[:-1], cuts[1:]):
        if b - a <= 4 * gap * hi:
            continue
        pts = max(8, int(np.ceil(n_points * (b - a) / total)))
        pad = gap * hi
        segs.append(np.linspace(a + pad, b - pad, pts))
    return segs


def _brackets(ep, nu, grid, refine_points):
    d = _normalized_det(system_matrix(ep, nu, grid))
    out = []
    for j in range(len(grid) - 1):
        if np.sign(d[j]) != np.sign(d[j + 1]) and d[j] != 0:
            out.append((grid[j], grid[j + 1], d[j], d[j + 1]))
    # a dip in |det| without a sign change can hide a close pair of roots
    a = np.abs(d)
    for j in range(1, len(grid) - 1):
        if a[j] < a[j - 1] and a[j] < a[j + 1] and np.sign(d[j - 1]) == np.sign(d[j + 1]):
            fine = np.linspace(grid[j - 1], grid[j + 1], 2 * refine_points + 1)
            df = _normalized_det(system_matrix(ep, nu, fine))
            for i in range(len(fine) - 1):
                if np.sign(df[i]) != np.sign(df[i + 1]) and df[i] != 0:
                    out.append((fine[i], fine[i + 1], df[i], df[i + 1]))
    out.sort(key=lambda t: t[0])
    return out


def find_roots(profile, omega, nu, settings=DEFAULT_SETTINGS):
    """All propagation constants at fixed (omega, nu), descending."""
    ep = _evaluated(profile, omega)
    if nu < 0 or int(nu) != nu:
        raise GuidanceDomainError(f"azimuthal order must be a non-negative integer, got {nu}")

    def f(b):
        return _normalized_det(system_matrix(ep, nu, np.array([b])))[0]

    roots = []
    for grid in _scan_segments(ep, settings.scan_points, settings.edge_gap):
        for a, b, fa, fb in _brackets(ep, nu, grid, settings.refine_points):
            if fa == 0:
                root = a
            else:
                root = brentq(f, a, b, xtol=settings.beta_tol / 4, rtol=4 * np.finfo(float).eps)
            # reject sign flips that are not zeros (should not occur away from thresholds)
            if abs(f(root)) > 1e-6 * max(abs(fa), abs(fb)):
                continue
            roots.append(root)
    roots = np.unique(np.array(roots))[::-1]
    return roots


class ModeList(list):
    """List of modes with solver diagnostics in ``warnings``."""

    def __init__(self, items=(), warnings_=()):
        super().__init__(items)
        self.warnings = list(warnings_)


def find_modes(profile, omega, nu, max_modes=8, settings=DEFAULT_SETTINGS):
    """Guided modes at (omega, nu), sorted by decreasing beta.

    Returns at most `max_modes` finalized modes.  Hybrid modes are returned with
    even parity; use :meth:`GuidedMode.with_parity` for the odd partner.
    """
    if max_modes < 1:
        raise ValueError("max_modes must be >= 1")
    ep = _evaluated(profile, omega)
    roots = find_roots(ep, omega, nu, settings)
    notes = []
    lo, hi = guidance_interval(ep)
    spacing = (hi - lo) / settings.scan_points
    for b1, b2 in zip(roots[:-1], roots[1:]):
        if abs(b1 - b2) < spacing:
            msg = f"n={nu}: roots {b1:.12g} and {b2:.12g} closer than scan spacing {spacing:.3g}"
            notes.append(msg)
            warnings.warn(msg, DegeneracyWarning, stacklevel=2)
    quad = _quadrature_for(profile, ep, settings)
    modes = [finalize_mode(ep, nu, b, quad) for b in roots]
    counters = {}
    labelled = []
    for mode in modes:
        counters[mode.family] = counters.get(mode.family, 0) + 1
        labelled.append(replace(mode, radial_index=counters[mode.family]))
    return ModeList(labelled[:max_modes], notes)


def _quadrature_for(profile, ep, settings):
    domain = getattr(profile, "domain_radius", None) or 3.0 * ep.boundaries[-1]
    return radial_quadrature(
        ep.boundaries, domain, settings.radial_points, settings.panel_order, settings.tail_points
    )


# ---------------------------------------------------------------------------
# fields


def _null_vector(ep, nu, beta):
    m = system_matrix(ep, nu, np.array([beta]))[0]
    norms = np.linalg.norm(m, axis=1)
    m = m / norms[:, None]
    layout = _Layout(ep.boundaries)
    if nu == 0:
        # TE and TM decouple: solve each block and keep the singular one
        best = None
        for fieldname, rows in (("a", (0, 3)), ("b", (1, 2))):
            cols = [c for region in layout.columns for c, f, _ in region if f == fieldname]
            rr = [4 * i + r for i in range(layout.n_boundaries) for r in rows]
            sub = m[np.ix_(rr, cols)]
            _, s, vt = np.linalg.svd(sub)
            sub_cond = s[-1] / s[0]
            if best is None or sub_cond < best[0]:
                vec = np.zeros(layout.size)
                vec[cols] = vt[-1]
                best = (sub_cond, vec)
        return best[1]
    _, s, vt = np.linalg.svd(m)
    return vt[-1]


def harmonic_fields(ep, nu, beta, coeffs, r):
    """The six field components of the exp(+i nu theta) harmonic at radii `r`."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    k0 = k0_per_um(ep.omega)
    layout = _Layout(ep.boundaries)
    region = np.searchsorted(ep.boundaries, r, side="right")
    a = np.zeros_like(r)
    da = np.zeros_like(r)
    b = np.zeros_like(r)
    db = np.zeros_like(r)
    k2 = np.zeros_like(r)
    eps = ep.eps[region]
    with np.errstate(all="ignore"):
        for k in range(layout.n_boundaries + 1):
            sel = region == k
            if not np.any(sel):
                continue
            kappa2 = ep.eps[k] * k0**2 - beta**2
            q = np.full(sel.sum(), np.sqrt(abs(kappa2)))
            osc = np.full(sel.sum(), kappa2 > 0)
            k2[sel] = kappa2
            for col, fieldname, which in layout.columns[k]:
                f, df = layout.basis(k, which, nu, q, osc, r[sel])
                if fieldname == "a":
                    a[sel] += coeffs[col] * f
                    da[sel] += coeffs[col] * df
                else:
                    b[sel] += coeffs[col] * f
                    db[sel] += coeffs[col] * df
        e_z = a.astype(complex)
        h_z = 1j * b
        e_theta = (-(nu * beta / r) * a + k0 * db) / k2 + 0j
        h_theta = 1j * (-(nu * beta / r) * b + k0 * eps * da) / k2
        e_r = 1j * (beta * da - (k0 * nu / r) * b) / k2
        h_r = -(beta * db - (k0 * eps * nu / r) * a) / k2 + 0j
    return {
        "e_r": e_r, "e_theta": e_theta, "e_z": e_z,
        "h_r": h_r, "h_theta": h_theta, "h_z": h_z,
    }


def axial_flux(quad, fields1, fields2=None):
    """Integral of Re-less (e1 x h2*).z over the plane for exp(i nu theta) harmonics, in W."""
    f2 = fields1 if fields2 is None else fields2
    integrand = fields1["e_r"] * np.conj(f2["h_theta"]) - fields1["e_theta"] * np.conj(f2["h_r"])
    return 2 * np.pi * quad.integrate(integrand) * UM**2 / CONSTANTS.z0


def _classify(nu, fields, quad):
    if nu == 0:
        ez = np.max(np.abs(fields["e_z"]))
        hz = np.max(np.abs(fields["h_z"]))
        return "TE" if ez < hz else "TM"
    co = quad.integrate(np.abs(fields["e_r"] - 1j * fields["e_theta"]) ** 2)
    counter = quad.integrate(np.abs(fields["e_r"] + 1j * fields["e_theta"]) ** 2)
    return "HE" if co > counter else "EH"


def finalize_mode(profile, nu, beta, quad=None, omega=None, settings=DEFAULT_SETTINGS):
    """Assemble, normalize to 1 W and classify the mode at root `beta`."""
    ep = _evaluated(profile, omega)
    if quad is None:
        quad = _quadrature_for(profile, ep, settings)
    coeffs = _null_vector(ep, nu, beta)
    # deterministic global sign: largest coefficient positive
    coeffs = coeffs * np.sign(coeffs[np.argmax(np.abs(coeffs))])
    fields = harmonic_fields(ep, nu, beta, coeffs, quad.nodes)
    power = axial_flux(quad, fields).real
    if not np.isfinite(power) or power <= 0:
        raise ModeFinalizationError(f"root beta={beta} at n={nu} carries no forward power")
    scale = 1.0 / np.sqrt(power)
    fields = {k: v * scale for k, v in fields.items()}
    family = _classify(nu, fields, quad)
    return GuidedMode(
        omega=ep.omega,
        azimuthal_order=int(nu),
        radial_index=1,
        beta=float(beta),
        family=family,
        parity="none" if nu == 0 else "even",
        layer_coefficients=coeffs * scale,
        profile=ep,
        quadrature=quad,
        fields=fields,
        norm=scale,
    )


@dataclass(frozen=True, eq=False)
class GuidedMode:
    """One eigen-solution: propagation constant, labels and sampled fields.

    ``fields`` holds the exp(+i n theta) harmonic on ``quadrature.nodes``;
    ``field_samples`` is the same data under the name used in exports.
    """

    omega: float
    azimuthal_order: int
    radial_index: int
    beta: float
    family: str
    parity: str
    layer_coefficients: np.ndarray
    profile: object
    quadrature: RadialQuadrature
    fields: dict = field(repr=False)
    norm: float = 1.0

    @property
    def n(self):
        return self.azimuthal_order

    @property
    def m(self):
        return self.radial_index

    @property
    def wavelength(self):
        return float(omega_to_wavelength(self.omega))

    @property
    def n_eff(self):
        """Effective index beta c / omega."""
        return self.beta / k0_per_um(self.omega)

    @property
    def label(self):
        return f"{self.family}{self.azimuthal_order}{self.radial_index}"

    @property
    def field_samples(self):
        return self.fields

    def with_parity(self, parity):
        if self.azimuthal_order == 0:
            if parity != "none":
                raise ValueError("n = 0 modes have no parity partner")
            return self
        if parity not in ("even", "odd"):
            raise ValueError(f"unknown parity {parity!r}")
        return replace(self, parity=parity)

    def parity_pair(self):
        return self.with_parity("even"), self.with_parity("odd")

    def harmonic_at(self, r):
        """Unit-power exp(+i n theta) harmonic evaluated at arbitrary radii."""
        return {
            k: v
            for k, v in harmonic_fields(
                self.profile, self.azimuthal_order, self.beta, self.layer_coefficients, r
            ).items()
        }

    def field_grid(self, theta, r=None):
        """Cylindrical components of this parity variant on an (r, theta) grid."""
        h = self.fields if r is None else self.harmonic_at(r)
        nu = self.azimuthal_order
        theta = np.asarray(theta, dtype=float)
        if nu == 0:
            return {k: v[:, None] * np.ones_like(theta)[None, :] for k, v in h.items()}
        c = np.sqrt(2) * np.cos(nu * theta)[None, :]
        s = np.sqrt(2) * np.sin(nu * theta)[None, :]
        # mirror partner flips e_theta, h_r, h_z
        cos_like = ("e_r", "e_z", "h_theta")
        out = {}
        for k, v in h.items():
            v = v[:, None]
            if self.parity == "even":
                out[k] = v * c if k in cos_like else 1j * v * s
            else:
                out[k] = v * s if k in cos_like else -1j * v * c
        return out

    def tangential_jumps(self):
        """Max relative jump of Ez, Hz, E_theta, H_theta across each boundary."""
        ep = self.profile
        jumps = []
        for rb in ep.boundaries:
            d = rb * 1e-13
            inner = self.harmonic_at(np.array([rb - d]))
            outer = self.harmonic_at(np.array([rb + d]))
            worst = 0.0
            for k in ("e_z", "h_z", "e_theta", "h_theta"):
                scale = np.max(np.abs(self.fields[k])) or 1.0
                worst = max(worst, abs(inner[k][0] - outer[k][0]) / scale)
            jumps.append(worst)
        return np.array(jumps)


def mode_cross_flux(m1, m2):
    """Axial flux of e1 x h2* integrated over the plane for the parity variants."""
    if m1.quadrature is not m2.quadrature and not np.array_equal(
        m1.quadrature.nodes, m2.quadrature.nodes
    ):
        raise ValueError("modes sampled on different radial grids")
    if m1.azimuthal_order != m2.azimuthal_order:
        return 0j
    if m1.azimuthal_order > 0 and m1.parity != m2.parity:
        return 0j
    return axial_flux(m1.quadrature, m1.fields, m2.fields)


def mode_table_rows(modes):
    rows = []
    for mode in modes:
        rows.append(
            {
                "lambda_um": mode.wavelength,
                "n": mode.azimuthal_order,
                "m": mode.radial_index,
                "family": mode.family,
                "parity": mode.parity,
                "beta_rad_per_um": mode.beta,
                "n_eff": mode.n_eff,
            }
        )
    return rows
