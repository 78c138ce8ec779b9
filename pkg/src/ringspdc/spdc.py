"""Two-photon coefficients, signal photon-number densities and derived figures.

Normalization chain
-------------------
Modes carry 1 W of axial flux in the positive-frequency convention used by
:mod:`ringspdc.modes`, so a classical pump ``E = A_p e_p exp(...) + c.c.``
carries ``P = 2 |A_p|^2 * 1 W``.  Signal and idler mode functions enter the
quantized field as ``e_hat = e * sqrt(n_eff eps0 c / 1 W)`` (unit-area
normalization).  The first-order state coefficient under a monochromatic pump
is

    c(w_s) = -(i/c) A_p sqrt(w_s w_i / (n_s n_i)) I(w_s, w_i),  w_i = w_p - w_s

with ``I = Z(dbeta) * integral chi : e_p e_hat_s* e_hat_i* dS`` in m.  The
long-interaction-time limit turns the squared energy delta into ``T / 2 pi``,
so the signal density per unit time is ``n(w_s) = sum_i |c|^2 / (2 pi)``
pairs/s per rad/s.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import sici

from .constants import CONSTANTS, UM, omega_to_wavelength, wavelength_to_omega
from .oam import ModeKey
from .qpm import (
    NotGuidedError,
    ProcessSpec,
    _fwhm,
    build_dispersion_table,
    grating_spectrum,
    selection_allowed,
    tensor_charges,
)

THETA_POINTS = 256
SINC2_FWHM = 2 * 1.3915573782515103  # full width of sinc^2(x) at half maximum, in x


class ResolutionError(ValueError):
    """Spectral grid too coarse for an unaliased Fourier transform."""


class PerturbativeWarning(UserWarning):
    pass


class TruncationWarning(UserWarning):
    pass


# ---------------------------------------------------------------------------
# pump


@dataclass(frozen=True)
class PumpSpec:
    """Classical pump.

    ``power`` is the cw power (monochromatic) or the average power of a pulse
    train (gaussian, with `repetition_rate`).  `leakage` maps mode labels to
    power fractions diverted from the main mode.
    """

    wavelength: float = 0.775
    power: float = 1e-6
    mode: object = "HE21_R"
    spectrum: str = "monochromatic"
    sigma: float = None
    repetition_rate: float = 80e6
    leakage: tuple = ()

    def __post_init__(self):
        if not self.power > 0:
            raise ValueError("pump power must be positive")
        if self.spectrum not in ("monochromatic", "gaussian"):
            raise ValueError(f"unknown pump spectrum {self.spectrum!r}")
        if self.spectrum == "gaussian" and not (self.sigma and self.sigma > 0):
            raise ValueError("gaussian pump needs sigma > 0 (rad/s)")
        key = self.mode if isinstance(self.mode, ModeKey) else ModeKey.parse(
            getattr(self.mode, "label", str(self.mode))
        )
        object.__setattr__(self, "mode", key)
        leak = tuple((ModeKey.parse(str(k)) if not isinstance(k, ModeKey) else k, float(f))
                     for k, f in dict(self.leakage).items())
        object.__setattr__(self, "leakage", leak)
        if any(f < 0 for _, f in leak) or sum(f for _, f in leak) >= 1:
            raise ValueError("leakage fractions must be non-negative and sum below 1")

    @property
    def omega(self):
        return float(wavelength_to_omega(self.wavelength))

    @property
    def photon_rate(self):
        return self.power / (CONSTANTS.hbar * self.omega)

    @property
    def amplitude(self):
        """Main-mode A_p: ``2 A_p^2 * 1 W = P`` (monochromatic)."""
        return dict(self.mode_amplitudes())[self.mode]

    def mode_amplitudes(self):
        """``[(key, A_p)]`` including leakage modes."""
        main = 1.0 - sum(f for _, f in self.leakage)
        parts = [(self.mode, main)] + [(k, f) for k, f in self.leakage if f > 0]
        if self.spectrum == "monochromatic":
            return [(k, np.sqrt(f * self.power / 2.0)) for k, f in parts]
        # pulse energy E = 4 pi |A_p|^2 * (1 W s) for a unit-norm spectral amplitude
        energy = self.power / self.repetition_rate
        return [(k, np.sqrt(f * energy / (4 * np.pi))) for k, f in parts]

    def spectral_amplitude(self, omega):
        """Gaussian amplitude with ``integral |E(w)|^2 dw = 1``; std of |E|^2 is sigma."""
        d = np.asarray(omega) - self.omega
        return (2 * np.pi * self.sigma**2) ** -0.25 * np.exp(-(d**2) / (4 * self.sigma**2))


# ---------------------------------------------------------------------------
# transverse overlap


def _same_grid(*modes):
    q0 = modes[0].quadrature
    for m in modes[1:]:
        if m.quadrature is not q0 and not np.array_equal(m.quadrature.nodes, q0.nodes):
            raise ValueError("modes sampled on different radial grids")
    return q0


def transverse_integral(pump, signal, idler, tensor, theta_points=THETA_POINTS):
    """``integral r dr dtheta T_ijk e_p,i e_s,j* e_i,k*`` over the plane, SI (V^3/m).

    Full (r, theta) quadrature: Cartesian components are formed pointwise on a
    `theta_points` trapezoid grid.  Field arguments are unit-power modes.
    """
    quad = _same_grid(pump, signal, idler)
    p, s, i = (cartesian_samples(m, theta_points) for m in (pump, signal, idler))
    return integrate_samples(quad, p, [c.conj() for c in s], [c.conj() for c in i], tensor)


def cartesian_samples(mode, theta_points=THETA_POINTS):
    """``(e_x, e_y)`` on the (r, theta) grid used by :func:`transverse_integral`."""
    theta = 2 * np.pi * np.arange(theta_points) / theta_points
    return mode.transverse_cartesian(theta)


def integrate_samples(quad, p, s_conj, i_conj, tensor):
    """Contract sampled Cartesian fields with `tensor` and integrate over the plane."""
    integrand = 0
    for a, b, c in zip(*np.nonzero(tensor)):
        integrand = integrand + tensor[a, b, c] * p[a] * s_conj[b] * i_conj[c]
    angular = 2 * np.pi * integrand.mean(axis=1)
    return complex(quad.integrate(angular)) * UM**2


def _cartesian_harmonics(mode):
    """``[(order, c_x(r), c_y(r))]`` with ``e_x = sum c_x exp(i order theta)``."""
    out = []
    for j, w, f in mode.harmonics():
        r, t = w * f["e_r"], w * f["e_theta"]
        out.append((j + 1, 0.5 * (r + 1j * t), 0.5 * (t - 1j * r)))
        out.append((j - 1, 0.5 * (r - 1j * t), 0.5 * (t + 1j * r)))
    return out


def transverse_integral_shortcut(pump, signal, idler, tensor):
    """Same integral with the azimuthal part done analytically (oracle route)."""
    quad = _same_grid(pump, signal, idler)
    hp, hs, hi = (_cartesian_harmonics(m) for m in (pump, signal, idler))
    total = 0j
    for op, px, py in hp:
        for os_, sx, sy in hs:
            for oi, ix, iy in hi:
                if op - os_ - oi != 0:
                    continue
                p, s, i = (px, py), (np.conj(sx), np.conj(sy)), (np.conj(ix), np.conj(iy))
                radial = 0
                for a, b, c in zip(*np.nonzero(tensor)):
                    radial = radial + tensor[a, b, c] * p[a] * s[b] * i[c]
                total += 2 * np.pi * quad.integrate(radial)
    return complex(total) * UM**2


def quantized_scale(mode):
    """Factor turning a unit-power field (V/m) into the unit-area mode function (1/m)."""
    return np.sqrt(mode.n_eff * CONSTANTS.epsilon_0 * CONSTANTS.c / 1.0)


def transverse_overlap(pump, signal, idler, grating, omega_s=None, omega_i=None,
                       route="full"):
    """Overlap ``I`` (m) including the longitudinal factor ``Z(dbeta)``.

    The pump enters as its unit-power field, signal and idler as unit-area
    mode functions.  ``dbeta`` comes from the modes' own propagation
    constants.
    """
    for mode, w in ((signal, omega_s), (idler, omega_i)):
        if w is not None and abs(mode.omega - w) > 1e-9 * w:
            raise NotGuidedError(mode.label, float(omega_to_wavelength(w)),
                                 "mode resolved at a different frequency")
    fn = transverse_integral if route == "full" else transverse_integral_shortcut
    t = fn(pump, signal, idler, grating.tensor())
    t *= quantized_scale(signal) * quantized_scale(idler)
    dbeta = pump.beta - signal.beta - idler.beta
    return complex(grating_spectrum(grating, dbeta)) * t


# ---------------------------------------------------------------------------
# overlap tables


@dataclass
class OverlapTable:
    """Transverse integral on a coarse signal-frequency grid, cubic-interpolated.

    Values are in the unit-area normalization for signal and idler; the overall
    sign of each sample is aligned with its neighbour so the interpolant is
    smooth (mode signs are only fixed up to +-1).
    """

    pump: ModeKey
    signal: ModeKey
    idler: ModeKey
    omega_s: np.ndarray
    values: np.ndarray
    n_signal: np.ndarray
    n_idler: np.ndarray

    def __post_init__(self):
        self._re = CubicSpline(self.omega_s, self.values.real)
        self._im = CubicSpline(self.omega_s, self.values.imag)
        self._ns = CubicSpline(self.omega_s, self.n_signal)
        self._ni = CubicSpline(self.omega_s, self.n_idler)

    def __call__(self, omega_s):
        return self._re(omega_s) + 1j * self._im(omega_s)

    def effective_indices(self, omega_s):
        return self._ns(omega_s), self._ni(omega_s)


def build_overlap_table(cache, pump_key, signal_key, idler_key, tensor, omega_s,
                        pump_omega=None):
    pump_mode = cache.pump_mode(pump_key, pump_omega)
    w_p = pump_mode.omega
    vals, ns, ni = [], [], []
    for w in omega_s:
        s = cache.mode_at(signal_key, w)
        i = cache.mode_at(idler_key, w_p - w)
        t = transverse_integral(pump_mode, s, i, tensor)
        vals.append(t * quantized_scale(s) * quantized_scale(i))
        ns.append(s.n_eff)
        ni.append(i.n_eff)
    vals = np.array(vals)
    for k in range(1, len(vals)):
        if (vals[k] * np.conj(vals[k - 1])).real < 0:
            vals[k] = -vals[k]
    return OverlapTable(ModeKey.parse(str(pump_key)) if not isinstance(pump_key, ModeKey) else pump_key,
                        signal_key, idler_key, np.asarray(omega_s), vals, np.array(ns), np.array(ni))


# ---------------------------------------------------------------------------
# spectra


@dataclass
class JointAmplitude:
    """Coefficients ``c(w_s)`` per (signal, idler) pair; idler fixed by w_p - w_s."""

    mode_pairs: list
    omega_s: np.ndarray
    coefficients: np.ndarray
    omega_p: float

    def __post_init__(self):
        self.omega_s = np.asarray(self.omega_s, dtype=float)
        if np.any(np.diff(self.omega_s) <= 0):
            raise ValueError("signal frequency grid must be strictly increasing")
        if np.any(self.omega_p - self.omega_s <= 0):
            raise ValueError("idler frequency must stay positive")

    @property
    def omega_i(self):
        return self.omega_p - self.omega_s

    def dominant(self):
        k = int(np.argmax(np.max(np.abs(self.coefficients), axis=1)))
        return self.mode_pairs[k], self.coefficients[k]


@dataclass
class SignalDensity:
    """Photon-number density of one signal mode, pairs/s per rad/s."""

    mode: str
    wavelength: np.ndarray
    density: np.ndarray
    per_idler: dict = field(default_factory=dict)

    @property
    def omega(self):
        return wavelength_to_omega(self.wavelength)

    @property
    def density_per_nm(self):
        """pairs/s per nm of signal wavelength."""
        lam_m = self.wavelength * UM
        return self.density * 2 * np.pi * CONSTANTS.c / lam_m**2 * 1e-9

    def peak(self):
        k = int(np.argmax(self.density))
        return float(self.wavelength[k]), float(self.density[k])


class SpdcModel:
    """Fiber + grating + pump with cached dispersion and overlap tables.

    Parameters
    ----------
    cache : DispersionCache
    grating : PolingGrating
    pump : PumpSpec
    overlap_points : int
        Coarse signal-frequency samples for overlap tables.
    """

    def __init__(self, cache, grating, pump, overlap_points=25):
        if abs(cache.pump_wavelength - pump.wavelength) > 1e-12:
            raise ValueError("dispersion cache and pump disagree on the pump wavelength")
        self.cache = cache
        self.grating = grating
        self.pump = pump
        self.overlap_points = overlap_points
        self.charges = tensor_charges(grating.tensor())
        lo, hi = cache.omega_range
        w_p = cache.omega_p
        # signal frequencies whose idler is also inside the tabulated range
        self.omega_s_range = (max(lo, w_p - hi), min(hi, w_p - lo))
        self._overlaps = {}
        self._pump_tables = {}

    def with_grating(self, grating):
        other = SpdcModel(self.cache, grating, self.pump, self.overlap_points)
        if np.array_equal(grating.tensor(), self.grating.tensor()):
            other._overlaps = self._overlaps
        other._pump_tables = self._pump_tables
        return other

    def with_pump(self, pump):
        other = SpdcModel(self.cache, self.grating, pump, self.overlap_points)
        other._overlaps = self._overlaps
        other._pump_tables = self._pump_tables
        return other

    def allowed(self, pump_key, signal_key, idler_key):
        return selection_allowed(pump_key, signal_key, idler_key, self.charges)

    def overlap(self, pump_key, signal_key, idler_key):
        k = (pump_key, signal_key, idler_key)
        if k not in self._overlaps:
            w = np.linspace(*self.omega_s_range, self.overlap_points)
            self._overlaps[k] = build_overlap_table(
                self.cache, pump_key, signal_key, idler_key, self.grating.tensor(), w
            )
        return self._overlaps[k]

    def _check_band(self, omega_s, key):
        lo, hi = self.omega_s_range
        bad = (omega_s < lo * (1 - 1e-12)) | (omega_s > hi * (1 + 1e-12))
        if np.any(bad):
            raise NotGuidedError(str(key), float(omega_to_wavelength(omega_s[bad][0])),
                                 "outside the dispersion tables")

    def coefficient(self, signal_key, idler_key, omega_s):
        """Monochromatic-pump coefficient c(w_s) summed coherently over pump modes."""
        signal_key, idler_key = _key(signal_key), _key(idler_key)
        omega_s = np.asarray(omega_s, dtype=float)
        self._check_band(omega_s, signal_key)
        w_p = self.cache.omega_p
        w_i = w_p - omega_s
        total = np.zeros(omega_s.shape, dtype=complex)
        for pk, amp in self.pump.mode_amplitudes():
            if not self.allowed(pk, signal_key, idler_key):
                continue
            table = self.overlap(pk, signal_key, idler_key)
            dbeta = (self.cache.pump_beta(pk) - self.cache.beta(signal_key, omega_s)
                     - self.cache.beta(idler_key, w_i))
            n_s, n_i = table.effective_indices(omega_s)
            # table values already carry sqrt(n_s n_i) eps0 c from the mode functions
            i_full = grating_spectrum(self.grating, dbeta) * table(omega_s)
            total += -(1j / CONSTANTS.c) * amp * np.sqrt(omega_s * w_i / (n_s * n_i)) * i_full
        return total

    def joint_amplitude(self, pairs, omega_s):
        pairs = [(_key(s), _key(i)) for s, i in pairs]
        coeffs = np.array([self.coefficient(s, i, omega_s) for s, i in pairs])
        return JointAmplitude([(s.label, i.label) for s, i in pairs], omega_s, coeffs,
                              self.cache.omega_p)

    def signal_density(self, signal_key, lambda_s, idlers):
        signal_key = _key(signal_key)
        idlers = [_key(i) for i in idlers]
        if not idlers:
            raise ValueError("candidate idler set is empty")
        lam = np.asarray(lambda_s, dtype=float)
        w = wavelength_to_omega(lam)
        per = {}
        if self.pump.spectrum == "monochromatic":
            for idl in idlers:
                per[idl.label] = np.abs(self.coefficient(signal_key, idl, w)) ** 2 / (2 * np.pi)
        else:
            for idl in idlers:
                per[idl.label] = self._pulsed_density(signal_key, idl, w)
        total = np.sum(list(per.values()), axis=0)
        return SignalDensity(signal_key.label, lam, total, per)

    # pulsed pump: integrate |C(w_s, w_i)|^2 over idler frequencies
    def _pump_table(self, key):
        if key not in self._pump_tables:
            w0, s = self.pump.omega, self.pump.sigma
            self._pump_tables[key] = build_dispersion_table(
                self.cache.profile, key, w0 - 8 * s, w0 + 8 * s, points=64, coarse=5,
                settings=self.cache.settings,
            )
        return self._pump_tables[key]

    def _pulsed_density(self, signal_key, idler_key, omega_s, points=401):
        w0, sig = self.pump.omega, self.pump.sigma
        out = np.zeros(omega_s.shape)
        offsets = np.linspace(-6 * sig, 6 * sig, points)
        for pk, amp in self.pump.mode_amplitudes():
            if not self.allowed(pk, signal_key, idler_key):
                continue
            table = self.overlap(pk, signal_key, idler_key)
            ptab = self._pump_table(pk)
            n_s, n_i = table.effective_indices(omega_s)
            t = table(omega_s)
            for k, ws in enumerate(omega_s):
                wp = w0 + offsets
                wi = wp - ws
                dbeta = ptab(wp) - self.cache.beta(signal_key, ws) - self.cache.beta(idler_key, wi)
                c = (-(1j / CONSTANTS.c) * amp * np.sqrt(ws * wi / (n_s[k] * n_i[k]))
                     * self.pump.spectral_amplitude(wp) * grating_spectrum(self.grating, dbeta) * t[k])
                out[k] += np.trapezoid(np.abs(c) ** 2, wp) * self.pump.repetition_rate
        return out


def _key(k):
    return k if isinstance(k, ModeKey) else ModeKey.parse(str(k))


def signal_density(signal_key, lambda_s, model, idlers):
    """Signal photon-number density of `signal_key` over `lambda_s` (um)."""
    return model.signal_density(signal_key, lambda_s, idlers)


# ---------------------------------------------------------------------------
# derived figures


def sinc2_outside_fraction(x):
    """Fraction of the integral of sinc^2 lying outside ``|arg| > x``."""
    si, _ = sici(2 * x)
    return 1.0 - (2 / np.pi) * (si - np.sin(x) ** 2 / x)


def peak_fwhm(model, signal_key, idlers, lambda_grid, density=None, refine=10):
    """``(peak_lambda_um, fwhm_nm)`` of the dominant peak, refined locally `refine` times."""
    if density is None:
        density = model.signal_density(signal_key, lambda_grid, idlers).density
    k = int(np.argmax(density))
    step = lambda_grid[1] - lambda_grid[0]
    half = density[k] / 2
    lo = k
    while lo > 0 and density[lo] > half:
        lo -= 1
    hi = k
    while hi < len(density) - 1 and density[hi] > half:
        hi += 1
    span = (hi - lo + 2) * step
    a = max(lambda_grid[0], lambda_grid[k] - span)
    b = min(lambda_grid[-1], lambda_grid[k] + span)
    pts = max(int(round((b - a) / step * refine)), 21)
    fine = np.linspace(a, b, pts)
    d = model.signal_density(signal_key, fine, idlers).density
    return float(fine[np.argmax(d)]), _fwhm(fine, d) * 1e3


def pair_rate_report(model, process, idlers=None, band_fwhm=15, lambda_grid=None,
                     integration_points=20001):
    """Pair rate, efficiency and FWHM of the dominant peak of `process`.

    The rate integrates the signal density of ``process.signal`` (summed over
    `idlers`, default: the process idler in both handedness variants) over
    the dominant peak +- `band_fwhm` widths.
    """
    process = process if isinstance(process, ProcessSpec) else ProcessSpec.parse(str(process))
    if idlers is None:
        idlers = _handedness_variants(process.idler)
    if lambda_grid is None:
        lambda_grid = np.linspace(1.35, 1.70, 4000)
    peak_lambda, fwhm_nm = peak_fwhm(model, process.signal, idlers, lambda_grid)
    fwhm_um = fwhm_nm * 1e-3
    half = band_fwhm * fwhm_um
    lo, hi = model.omega_s_range
    lam_min = max(peak_lambda - half, float(omega_to_wavelength(hi)))
    lam_max = min(peak_lambda + half, float(omega_to_wavelength(lo)))
    lam = np.linspace(lam_min, lam_max, integration_points)
    dens = model.signal_density(process.signal, lam, idlers)
    w = wavelength_to_omega(lam)[::-1]
    per_idler = {k: float(np.trapezoid(v[::-1], w)) for k, v in dens.per_idler.items()}
    rate = float(sum(per_idler.values()))
    efficiency = rate / model.pump.photon_rate
    reach = min(peak_lambda - lam_min, lam_max - peak_lambda) / fwhm_um
    lost = float(sinc2_outside_fraction(reach * SINC2_FWHM))
    notes = []
    if lost > 0.01:
        msg = f"integration band +-{band_fwhm} FWHM misses an estimated {lost:.2%} of the peak"
        notes.append(msg)
        warnings.warn(msg, TruncationWarning, stacklevel=2)
    if efficiency > 1e-3:
        msg = f"pair probability per pump photon {efficiency:.3g} exceeds 1e-3"
        notes.append(msg)
        warnings.warn(msg, PerturbativeWarning, stacklevel=2)
    return {
        "process": process.label,
        "selection_rule_allowed": bool(process.allowed),
        "oam_rule_satisfied": bool(process.oam_conserved),
        "band_um": [float(lam[0]), float(lam[-1])],
        "band_fwhm_multiple": float(reach),
        "estimated_truncation": lost,
        "peak_lambda_um": peak_lambda,
        "fwhm_nm": fwhm_nm,
        "pairs_per_s": rate,
        "per_idler_pairs_per_s": per_idler,
        "efficiency": efficiency,
        "pump_power_w": model.pump.power,
        "pump_photon_energy_j": CONSTANTS.hbar * model.pump.omega,
        "warnings": notes,
    }


def _handedness_variants(key):
    if key.handedness == "none":
        return [key]
    return [ModeKey(key.family, key.n, key.m, "R"), ModeKey(key.family, key.n, key.m, "L")]


def correlation_time(joint, pair=None, tau_points=4001):
    """FWHM (s) of the squared signal-idler delay amplitude.

    The coefficient of the dominant pair (or `pair`) is Fourier transformed
    over ``w_s`` by direct summation on its (possibly non-uniform) grid.
    """
    if pair is None:
        _, coeff = joint.dominant()
    else:
        coeff = joint.coefficients[joint.mode_pairs.index(pair)]
    w = joint.omega_s
    dw = np.diff(w)
    step = dw.max()
    window = 2 * np.pi / step
    tau = np.linspace(-window / 2, window / 2, tau_points)
    weights = np.concatenate([[dw[0] / 2], 0.5 * (dw[1:] + dw[:-1]), [dw[-1] / 2]])
    w0 = w[np.argmax(np.abs(coeff))]
    phase = np.exp(-1j * np.outer(tau, w - w0))
    g = np.abs(phase @ (coeff * weights)) ** 2
    width = _fwhm(tau, g)
    if step / (2 * np.pi) * width >= 0.1:
        need = 0.1 * 2 * np.pi / width
        raise ResolutionError(
            f"grid step {step:.3g} rad/s too coarse for a {width:.3g} s window; "
            f"need <= {need:.3g} rad/s"
        )
    return width


def coefficient_grid(peak_lambda, fwhm_nm, half_width=40, points=4001):
    """Uniform signal-frequency grid of +- `half_width` peak widths."""
    w0 = float(wavelength_to_omega(peak_lambda))
    dw = w0 * fwhm_nm * 1e-3 / peak_lambda
    return np.linspace(w0 - half_width * dw, w0 + half_width * dw, points)


# ---------------------------------------------------------------------------
# units audit


_BASE = ("kg", "m", "s", "A")


def _u(**exp):
    return np.array([exp.get(b, 0) for b in _BASE], dtype=float)


UNITS = {
    "volt": _u(kg=1, m=2, s=-3, A=-1),
    "watt": _u(kg=1, m=2, s=-3),
    "farad_per_m": _u(kg=-1, m=-3, s=4, A=2),
    "speed": _u(m=1, s=-1),
    "rate": _u(s=-1),
}


def units_audit():
    """Dimension exponents (kg, m, s, A) of each link in the normalization chain.

    Returns a dict of named quantities; ``density`` must come out as
    ``pairs / s / (rad / s)``, i.e. dimensionless.
    """
    v, w, eps0, c = UNITS["volt"], UNITS["watt"], UNITS["farad_per_m"], UNITS["speed"]
    field_unit_power = v - _u(m=1)  # e_p, V/m for 1 W
    amplitude = (w - w) / 2  # A_p = sqrt(P / 2 W)
    mode_function = field_unit_power + (eps0 + c - w) / 2  # e_hat, 1/m
    chi = _u(m=1) - v
    z_factor = chi + _u(m=1)  # chi0 * length
    transverse = field_unit_power + 2 * mode_function + _u(m=2)
    overlap = z_factor + transverse  # I
    coeff = -c + amplitude + UNITS["rate"] + overlap  # (1/c) A_p sqrt(w w / n n) I
    density = 2 * coeff  # |c|^2 / 2 pi : pairs/s per rad/s
    return {
        "mode_function": mode_function,
        "overlap": overlap,
        "coefficient": coeff,
        "density": density,
        "rate": density + UNITS["rate"],
    }
