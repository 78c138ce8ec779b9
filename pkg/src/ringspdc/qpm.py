"""Phase mismatch, the longitudinal chi(2) grating and poling-period design.

``delta_beta = beta_p(omega_p) - beta_s(omega_s) - beta_i(omega_p - omega_s)``
is positive for normally dispersive fibers.  A first-order grating of period
``Lambda`` compensates it when ``|delta_beta| = 2 pi / Lambda``; the grating
spectrum is symmetric in the sign of ``delta_beta`` because the chi(2) profile
is real.

The longitudinal factor is

    Z(dbeta) = chi_0 * integral_{-L}^{0} s(z) exp(i dbeta z) dz

with ``s(z)`` the on/off poling pattern and ``chi_0`` the reference tensor
element (``chi_xyy``) in m/V, so ``Z`` is in m^2/V.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .constants import omega_to_wavelength, wavelength_to_omega
from .materials import build_profile
from .modes import (
    DEFAULT_SETTINGS,
    _normalized_det,
    finalize_mode,
    find_roots,
    guidance_interval,
    system_matrix,
)
from .oam import ModeKey, oam_mode

PM_PER_V = 1e-12
UM = 1e-6


class NotGuidedError(RuntimeError):
    """A mode is not guided (or not tabulated) at a requested frequency."""

    def __init__(self, key, wavelength, detail=""):
        self.key = key
        self.wavelength = wavelength
        msg = f"mode {key} not guided at {wavelength:.6f} um"
        super().__init__(msg + (f" ({detail})" if detail else ""))


class NoGratingNeeded(ValueError):
    """Phase mismatch already vanishes; no poling period is required."""


class GratingWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# grating


@dataclass(frozen=True)
class PolingGrating:
    """Periodic chi(2) grating.

    Parameters
    ----------
    period : float
        Poling period in um.
    length : float
        Grating length in m.
    chi_xxx, chi_xyy : float
        Tensor elements in pm/V; ``chi_yxy = chi_yyx = chi_xyy``.
    duty : float
        Fraction of each period carrying the nonlinearity.
    profile : {"rectangular_on_off", "uniform"}
    """

    period: float
    length: float = 1.0
    chi_xxx: float = 0.063
    chi_xyy: float = 0.021
    duty: float = 0.5
    profile: str = "rectangular_on_off"
    ratio_tolerance: float = field(default=0.05, compare=False)

    def __post_init__(self):
        if not self.period > 0 or not self.length > 0:
            raise ValueError("period and length must be positive")
        if not 0 < self.duty < 1:
            raise ValueError("duty must lie in (0, 1)")
        if self.profile not in ("rectangular_on_off", "uniform"):
            raise ValueError(f"unknown grating profile {self.profile!r}")
        if self.chi_xyy == 0:
            raise ValueError("chi_xyy is the reference element and must be nonzero")
        if abs(self.chi_xxx - 3 * self.chi_xyy) > self.ratio_tolerance * abs(3 * self.chi_xyy):
            warnings.warn(
                f"chi_xxx = {self.chi_xxx} deviates from 3 chi_xyy = {3 * self.chi_xyy}",
                GratingWarning,
                stacklevel=3,
            )

    @property
    def chi0(self):
        """Reference element in m/V."""
        return self.chi_xyy * PM_PER_V

    @property
    def length_um(self):
        return self.length / UM

    @property
    def periods(self):
        return self.length_um / self.period

    def tensor(self):
        """Transverse (x, y) tensor relative to chi_xyy, index order (pump, signal, idler)."""
        t = np.zeros((2, 2, 2))
        t[0, 0, 0] = self.chi_xxx / self.chi_xyy
        t[0, 1, 1] = t[1, 0, 1] = t[1, 1, 0] = 1.0
        return t

    def with_length(self, length):
        return PolingGrating(self.period, length, self.chi_xxx, self.chi_xyy, self.duty,
                             self.profile, self.ratio_tolerance)

    def with_period(self, period):
        return PolingGrating(period, self.length, self.chi_xxx, self.chi_xyy, self.duty,
                             self.profile, self.ratio_tolerance)

    def with_chi(self, chi_xxx, chi_xyy):
        return PolingGrating(self.period, self.length, chi_xxx, chi_xyy, self.duty,
                             self.profile, self.ratio_tolerance)

    def on_intervals(self):
        """``(starts, ends)`` of the nonlinear segments in um, within [-L, 0]."""
        length = self.length_um
        if self.profile == "uniform":
            return np.array([-length]), np.array([0.0])
        k = np.arange(int(np.ceil(self.periods)))
        starts = -length + k * self.period
        ends = np.minimum(starts + self.duty * self.period, 0.0)
        keep = ends > starts
        return starts[keep], ends[keep]


def tensor_charges(tensor, tol=1e-12):
    """Azimuthal charges ``q = s_p - s_s - s_i`` carried by a transverse tensor.

    Contracting with circular unit vectors ``(x + i s y)/sqrt(2)`` (pump) and
    their conjugates (signal, idler) picks up ``exp(-i q phi)`` under a
    rotation by ``phi``.  Returns the sorted set of charges with nonzero
    contraction.
    """
    vec = {1: np.array([1, 1j]) / np.sqrt(2), -1: np.array([1, -1j]) / np.sqrt(2)}
    scale = np.max(np.abs(tensor))
    charges = set()
    for sp in (1, -1):
        for ss in (1, -1):
            for si in (1, -1):
                val = np.einsum("ijk,i,j,k->", tensor, vec[sp], vec[ss].conj(), vec[si].conj())
                if abs(val) > tol * scale:
                    charges.add(sp - ss - si)
    return sorted(charges)


def _phi(q, a):
    """(exp(i q a) - 1) / (i q), stable at q = 0."""
    return a * np.exp(0.5j * q * a) * np.sinc(q * a / (2 * np.pi))


def _dirichlet(x, n):
    """sum_{k<n} exp(2 i k x) * exp(-i (n-1) x) = sin(n x)/sin(x), stable near x = m pi."""
    m = np.rint(x / np.pi)
    xr = x - m * np.pi
    sign = np.where((m.astype(np.int64) * (n - 1)) % 2 == 0, 1.0, -1.0)
    return sign * n * np.sinc(n * xr / np.pi) / np.sinc(xr / np.pi)


def grating_spectrum(grating, dbeta):
    """Closed-form longitudinal factor ``Z(dbeta)`` in m^2/V (dbeta in rad/um)."""
    q = np.asarray(dbeta, dtype=float)
    length = grating.length_um
    if grating.profile == "uniform":
        z = np.exp(-0.5j * q * length) * length * np.sinc(q * length / (2 * np.pi))
        return grating.chi0 * UM * z
    lam = grating.period
    on = grating.duty * lam
    n_full = int(np.floor(grating.periods + 1e-12))
    # whole periods: exp(-i q L) sum_k exp(i q k Lambda) phi(q, on)
    x = 0.5 * q * lam
    series = np.exp(1j * x * (n_full - 1)) * _dirichlet(x, n_full) if n_full > 0 else 0.0
    z = np.exp(-1j * q * length) * series * _phi(q, on)
    # remainder period starting at z_N
    z_n = -length + n_full * lam
    rem = min(on, -z_n)
    if rem > 1e-12 * lam:
        z = z + np.exp(1j * q * z_n) * _phi(q, rem)
    return grating.chi0 * UM * z


def grating_spectrum_quadrature(grating, dbeta, panels=10**6, order=4):
    """Direct Gauss-Legendre z-quadrature of the grating integral (oracle)."""
    q = np.atleast_1d(np.asarray(dbeta, dtype=float))
    starts, ends = grating.on_intervals()
    total_on = np.sum(ends - starts)
    per = np.maximum(1, np.rint(panels * (ends - starts) / total_on).astype(int))
    x, w = np.polynomial.legendre.leggauss(order)
    zs, ws = [], []
    for a, b, p in zip(starts, ends, per):
        cuts = np.linspace(a, b, p + 1)
        h = np.diff(cuts)[:, None]
        mid = 0.5 * (cuts[1:] + cuts[:-1])[:, None]
        zs.append((mid + 0.5 * h * x[None, :]).ravel())
        ws.append((0.5 * h * w[None, :]).ravel())
    zs, ws = np.concatenate(zs), np.concatenate(ws)
    out = np.array([np.sum(ws * np.exp(1j * qq * zs)) for qq in q])
    return grating.chi0 * UM * out


def main_lobe_fwhm(grating, center=None, samples=4001):
    """FWHM (rad/um) of ``|Z|^2`` around its first-order peak (or `center`)."""
    k = 2 * np.pi / grating.period if center is None else center
    if grating.profile == "uniform" and center is None:
        k = 0.0
    width = 8 * np.pi / grating.length_um
    q = np.linspace(k - width, k + width, samples)
    p = np.abs(grating_spectrum(grating, q)) ** 2
    return _fwhm(q, p)


def _fwhm(x, y):
    """Full width at half maximum around the global maximum, by linear interpolation."""
    i = int(np.argmax(y))
    half = 0.5 * y[i]
    lo = i
    while lo > 0 and y[lo] > half:
        lo -= 1
    hi = i
    while hi < len(y) - 1 and y[hi] > half:
        hi += 1
    if y[lo] > half or y[hi] > half:
        raise ValueError("half maximum not bracketed on the sampled interval")
    xl = np.interp(half, [y[lo], y[lo + 1]], [x[lo], x[lo + 1]])
    xr = np.interp(half, [y[hi], y[hi - 1]], [x[hi], x[hi - 1]])
    return float(xr - xl)


# ---------------------------------------------------------------------------
# dispersion tables


@dataclass
class DispersionTable:
    """beta(omega) of one mode family on a uniform frequency grid, cubic-interpolated."""

    key: ModeKey
    omega: np.ndarray
    beta: np.ndarray
    spline: CubicSpline = field(repr=False)

    @property
    def omega_range(self):
        return float(self.omega[0]), float(self.omega[-1])

    def __call__(self, omega):
        omega = np.asarray(omega, dtype=float)
        lo, hi = self.omega_range
        tol = 1e-12 * hi
        if np.any(omega < lo - tol) or np.any(omega > hi + tol):
            bad = omega[(omega < lo - tol) | (omega > hi + tol)].ravel()[0]
            raise NotGuidedError(self.key.label, float(omega_to_wavelength(bad)),
                                 "outside the tabulated band")
        out = self.spline(omega)
        return float(out) if out.ndim == 0 else out

    def group_index(self, omega):
        from .constants import CONSTANTS
        return self.spline(omega, 1) * CONSTANTS.c / UM


def _family_roots(ep, omega, key, settings):
    """beta of mode `key` at `omega` from a full scan, or None if not guided."""
    roots = find_roots(ep, omega, key.n, settings)
    count = 0
    for b in roots:
        mode = finalize_mode(ep, key.n, b, settings=settings)
        if mode.family == key.family:
            count += 1
            if count == key.m:
                return float(b), roots
    return None, roots


def build_dispersion_table(profile, key, omega_min, omega_max, points=2000, coarse=24,
                           settings=DEFAULT_SETTINGS):
    """Tabulate beta(omega) for `key` over ``[omega_min, omega_max]``.

    Full root scans on a coarse grid identify the family; every fine-grid
    point is then re-solved by bracketed root refinement of the determinant
    around the coarse interpolant.  Raises :class:`NotGuidedError` if the mode
    is not guided anywhere in the band.
    """
    key = key if isinstance(key, ModeKey) else ModeKey.parse(key)
    base = ModeKey(key.family, key.n, key.m, "R" if key.n else "none")
    wc = np.linspace(omega_min, omega_max, coarse)
    bc, gaps = [], []
    for w in wc:
        ep = build_profile(profile, w)
        b, roots = _family_roots(ep, w, base, settings)
        if b is None:
            raise NotGuidedError(key.label, float(omega_to_wavelength(w)))
        others = np.abs(roots - b)
        others = others[others > 0]
        lo, hi = guidance_interval(ep)
        gaps.append(min(others.min() if others.size else np.inf, b - lo, hi - b))
        bc.append(b)
    coarse_spline = CubicSpline(wc, bc)
    gap_spline = CubicSpline(wc, gaps)
    wf = np.linspace(omega_min, omega_max, points)
    guess = coarse_spline(wf)
    half = 0.3 * np.maximum(gap_spline(wf), 1e-9)
    bf = np.empty(points)
    for i, w in enumerate(wf):
        ep = build_profile(profile, w)
        lo, hi = guidance_interval(ep)

        def f(b):
            return _normalized_det(system_matrix(ep, key.n, np.array([b])))[0]

        a = max(guess[i] - half[i], lo + 1e-12)
        b = min(guess[i] + half[i], hi - 1e-12)
        fa, fb = f(a), f(b)
        if np.sign(fa) == np.sign(fb):
            raise NotGuidedError(key.label, float(omega_to_wavelength(w)), "lost track of root")
        bf[i] = brentq(f, a, b, xtol=settings.beta_tol / 4, rtol=4 * np.finfo(float).eps)
    return DispersionTable(key, wf, bf, CubicSpline(wf, bf))


class DispersionCache:
    """Lazily built dispersion tables and pump-frequency modes for one fiber."""

    def __init__(self, profile, band_um=(1.35, 1.70), pump_wavelength=0.775, points=2000,
                 settings=DEFAULT_SETTINGS, threads=1):
        self.profile = profile
        self.pump_wavelength = float(pump_wavelength)
        self.omega_p = float(wavelength_to_omega(pump_wavelength))
        w_s = wavelength_to_omega(np.array(band_um))
        # cover signals and their idlers
        lo = min(w_s.min(), self.omega_p - w_s.max())
        hi = max(w_s.max(), self.omega_p - w_s.min())
        self.omega_range = (float(lo), float(hi))
        self.points = points
        self.settings = settings
        self.threads = max(1, int(threads))
        self._tables = {}
        self._pump = {}

    def _base(self, key):
        key = key if isinstance(key, ModeKey) else ModeKey.parse(key)
        return ModeKey(key.family, key.n, key.m, "R" if key.n else "none")

    def table(self, key):
        base = self._base(key)
        if base not in self._tables:
            self._tables[base] = build_dispersion_table(
                self.profile, base, *self.omega_range, points=self.points, settings=self.settings
            )
        return self._tables[base]

    def prepare(self, keys):
        """Build the tables for `keys`, in parallel when ``threads > 1``."""
        missing = sorted({self._base(k) for k in keys} - set(self._tables))
        if self.threads > 1 and len(missing) > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                built = list(pool.map(
                    lambda k: build_dispersion_table(self.profile, k, *self.omega_range,
                                                     points=self.points, settings=self.settings),
                    missing,
                ))
            for k, t in zip(missing, built):
                self._tables[k] = t
        else:
            for k in missing:
                self.table(k)

    def beta(self, key, omega):
        return self.table(key)(omega)

    def pump_mode(self, key, omega=None):
        """Finalized guided mode for `key` at the pump (or given) frequency."""
        omega = self.omega_p if omega is None else float(omega)
        base = self._base(key)
        cache_key = (base, omega)
        if cache_key not in self._pump:
            ep = build_profile(self.profile, omega)
            b, _ = _family_roots(ep, omega, base, self.settings)
            if b is None:
                raise NotGuidedError(base.label, float(omega_to_wavelength(omega)))
            self._pump[cache_key] = b
        return self.mode_at(key, omega, self._pump[cache_key])

    def pump_beta(self, key):
        self.pump_mode(key)
        return self._pump[(self._base(key), self.omega_p)]

    def mode_at(self, key, omega, beta=None):
        """OAM mode for `key` at `omega` (beta from the table unless given)."""
        key = key if isinstance(key, ModeKey) else ModeKey.parse(key)
        if beta is None:
            beta = self.beta(key, omega)
        mode = finalize_mode(self.profile, key.n, float(beta), omega=float(omega),
                             settings=self.settings)
        if mode.family != key.family:
            raise NotGuidedError(key.label, float(omega_to_wavelength(omega)),
                                 f"root classified as {mode.family}")
        from dataclasses import replace
        mode = replace(mode, radial_index=key.m)
        return oam_mode(mode, key.handedness)


# ---------------------------------------------------------------------------
# processes


def selection_allowed(pump, signal, idler, charges=(-1, 1)):
    """Total angular momentum rule: ``J_p - J_s - J_i`` must be a tensor charge."""
    return (pump.total_angular_momentum - signal.total_angular_momentum
            - idler.total_angular_momentum) in charges


@dataclass(frozen=True)
class ProcessSpec:
    """Pump -> signal + idler mode triple."""

    pump: ModeKey
    signal: ModeKey
    idler: ModeKey
    label: str = ""
    allowed: bool = field(default=None, compare=False)
    oam_conserved: bool = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("pump", "signal", "idler"):
            val = getattr(self, name)
            if not isinstance(val, ModeKey):
                val = val.key if hasattr(val, "key") else ModeKey.parse(str(val))
                object.__setattr__(self, name, val)
        if not self.label:
            object.__setattr__(
                self, "label", f"{self.pump.label}->{self.signal.label}+{self.idler.label}"
            )
        if self.allowed is None:
            object.__setattr__(self, "allowed", selection_allowed(self.pump, self.signal, self.idler))
        if self.oam_conserved is None:
            object.__setattr__(
                self, "oam_conserved",
                self.pump.winding_number == self.signal.winding_number + self.idler.winding_number,
            )

    @classmethod
    def parse(cls, text):
        """Parse ``"HE21_R -> HE21_R + HE11_R"``."""
        try:
            left, right = text.split("->")
            s, i = right.split("+")
        except ValueError:
            raise ValueError(f"cannot parse process {text!r}") from None
        return cls(ModeKey.parse(left), ModeKey.parse(s), ModeKey.parse(i))

    def swapped(self):
        return ProcessSpec(self.pump, self.idler, self.signal)


def phase_mismatch(process, lambda_s, cache):
    """Delta beta (rad/um) of `process` at signal wavelength(s) `lambda_s` (um)."""
    w_s = wavelength_to_omega(lambda_s)
    w_i = cache.omega_p - w_s
    if np.any(w_i <= 0):
        raise NotGuidedError(process.idler.label, float("inf"), "idler frequency not positive")
    return cache.pump_beta(process.pump) - cache.beta(process.signal, w_s) - cache.beta(process.idler, w_i)


def design_period(process, lambda_target, cache, order=1):
    """Poling period (um) compensating ``|delta_beta|`` at `lambda_target`."""
    if order < 1 or order % 2 == 0:
        raise ValueError("QPM order must be an odd positive integer")
    db = float(phase_mismatch(process, lambda_target, cache))
    if abs(db) < 1e-6:
        raise NoGratingNeeded(f"|delta_beta| = {abs(db):.3g} rad/um at {lambda_target} um")
    return 2 * np.pi * order / abs(db)


def delta_beta_scan(processes, lambda_s, cache):
    """Rows with keys ``lambda_s_um``, ``process``, ``delta_beta_rad_per_um``."""
    rows = []
    for proc in processes:
        db = phase_mismatch(proc, lambda_s, cache)
        rows.extend({"lambda_s_um": lam, "process": proc.label, "delta_beta_rad_per_um": d}
                    for lam, d in zip(np.asarray(lambda_s).tolist(), db.tolist()))
    return rows


def process_separation(processes, grating, lambda_band, cache, points=2001):
    """Suppression of competing processes relative to the first (target) one.

    For each other process: max over the band of ``|Z(dbeta_j)|^2`` divided by
    ``|Z|^2`` of the target at its own peak in the band.  Rows carry
    ``overlapping = True`` when a competing peak lies inside the band.
    """
    if len(processes) < 2:
        return []
    lam = np.linspace(lambda_band[0], lambda_band[1], points)
    target = processes[0]
    zt = np.abs(grating_spectrum(grating, phase_mismatch(target, lam, cache))) ** 2
    i = int(np.argmax(zt))
    # refine the target peak locally
    fine = np.linspace(lam[max(i - 1, 0)], lam[min(i + 1, points - 1)], 201)
    zt_fine = np.abs(grating_spectrum(grating, phase_mismatch(target, fine, cache))) ** 2
    peak = float(zt_fine.max())
    peak_lambda = float(fine[np.argmax(zt_fine)])
    rows = []
    for proc in processes[1:]:
        zc = np.abs(grating_spectrum(grating, phase_mismatch(proc, lam, cache))) ** 2
        j = int(np.argmax(zc))
        ratio = float(zc[j] / peak)
        rows.append({
            "process": proc.label,
            "ratio": ratio,
            "worst_lambda_um": float(lam[j]),
            "target_peak_lambda_um": peak_lambda,
            "overlapping": bool(0 < j < points - 1 and ratio > 0.5),
        })
    return rows
