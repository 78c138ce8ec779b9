"""Orbital-angular-momentum modes built from even/odd fiber eigenmodes.

Convention
----------
``R = (even + i odd)/sqrt(2)`` is the stored ``exp(+i n theta)`` harmonic, so
its total angular momentum is ``J = +n``; ``L`` is the mirror image with
``J = -n``.  Splitting the transverse field into circular components
``a_+ = (e_x - i e_y)/sqrt(2)`` (spin +1) and ``a_- = (e_x + i e_y)/sqrt(2)``
(spin -1), the component with spin ``s`` winds as ``exp(i (J - s) theta)``.
The winding number ``l`` is that of the dominant component:

* HE modes: ``l = J - sign(J) = +-(n - 1)`` (HE21_R -> +1, HE11_R -> 0)
* EH modes: ``l = J + sign(J) = +-(n + 1)``
* TE/TM: both components carry equal power (orders -1 and +1); ``l`` is
  stored as 0 and the measured winding is ambiguous.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .modes import axial_flux


class IncompatibleConstituentsError(ValueError):
    pass


class AmbiguousWindingError(ValueError):
    pass


_KEY_RE = re.compile(r"^(HE|EH|TE|TM)(\d)(\d+)(?:[_,]?(R|L))?$")


@dataclass(frozen=True, order=True)
class ModeKey:
    """Frequency-independent mode label such as ``HE21_R`` or ``TE01``."""

    family: str
    n: int
    m: int
    handedness: str = "none"

    def __post_init__(self):
        if self.family not in ("HE", "EH", "TE", "TM"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family in ("TE", "TM"):
            if self.n != 0 or self.handedness != "none":
                raise ValueError(f"{self.family} modes have n = 0 and no handedness")
        elif self.n < 1 or self.handedness not in ("R", "L"):
            raise ValueError(f"hybrid mode {self.family}{self.n}{self.m} needs n >= 1 and R/L")
        if self.m < 1:
            raise ValueError("radial index must be >= 1")

    @classmethod
    def parse(cls, text):
        match = _KEY_RE.match(text.strip().replace(" ", ""))
        if not match:
            raise ValueError(f"cannot parse mode label {text!r}")
        family, n, m, hand = match.groups()
        return cls(family, int(n), int(m), hand or "none")

    @property
    def label(self):
        base = f"{self.family}{self.n}{self.m}"
        return base if self.handedness == "none" else f"{base}_{self.handedness}"

    @property
    def total_angular_momentum(self):
        return {"R": self.n, "L": -self.n, "none": 0}[self.handedness]

    @property
    def winding_number(self):
        return winding_for(self.family, self.total_angular_momentum)

    @property
    def spin(self):
        """Spin of the dominant circular component (0 for TE/TM)."""
        return self.total_angular_momentum - self.winding_number

    def __str__(self):
        return self.label


def winding_for(family, j):
    if family in ("TE", "TM"):
        return 0
    s = int(np.sign(j))
    return j - s if family == "HE" else j + s


@dataclass(frozen=True, eq=False)
class OamMode:
    """Weighted combination of parity variants of one guided mode."""

    constituents: tuple
    winding_number: int
    handedness: str
    label: str

    def __post_init__(self):
        weights = np.array([w for _, w in self.constituents], dtype=complex)
        if abs(np.sum(np.abs(weights) ** 2) - 1.0) > 1e-12:
            raise IncompatibleConstituentsError("constituent weights must have unit norm")
        betas = [m.beta for m, _ in self.constituents]
        if max(betas) - min(betas) > 1e-9 * abs(betas[0]):
            raise IncompatibleConstituentsError("constituents differ in beta")

    @property
    def base(self):
        return self.constituents[0][0]

    @property
    def omega(self):
        return self.base.omega

    @property
    def beta(self):
        return self.base.beta

    @property
    def n_eff(self):
        return self.base.n_eff

    @property
    def family(self):
        return self.base.family

    @property
    def key(self):
        b = self.base
        return ModeKey(b.family, b.azimuthal_order, b.radial_index, self.handedness)

    @property
    def quadrature(self):
        return self.base.quadrature

    def harmonics(self):
        """``[(J, weight, fields)]`` with fields of the exp(iJ theta) harmonic on the nodes.

        Even/odd parities expand as ``(M+ +- M-)/sqrt(2)`` (odd with an extra
        ``1/i``); weights below 1e-14 are dropped.
        """
        base = self.base
        nu = base.azimuthal_order
        if nu == 0:
            w = sum(wt for _, wt in self.constituents)
            return [(0, complex(w), base.fields)]
        plus = minus = 0j
        for mode, wt in self.constituents:
            if mode.parity == "even":
                plus += wt / np.sqrt(2)
                minus += wt / np.sqrt(2)
            else:
                plus += wt / (np.sqrt(2) * 1j)
                minus -= wt / (np.sqrt(2) * 1j)
        out = []
        if abs(plus) > 1e-14:
            out.append((nu, plus, base.fields))
        if abs(minus) > 1e-14:
            out.append((-nu, minus, mirror_fields(base.fields)))
        return out

    def power(self):
        """Axial flux in W; distinct harmonics are orthogonal over theta."""
        return sum(abs(w) ** 2 * axial_flux(self.quadrature, f).real for _, w, f in self.harmonics())

    def field_grid(self, theta, r=None):
        """Cylindrical components on an (r, theta) grid from the parity constituents."""
        total = None
        for mode, wt in self.constituents:
            g = mode.field_grid(theta, r)
            if total is None:
                total = {k: wt * v for k, v in g.items()}
            else:
                for k, v in g.items():
                    total[k] = total[k] + wt * v
        return total

    def transverse_cartesian(self, theta, r=None):
        """``(e_x, e_y)`` on an (r, theta) grid."""
        g = self.field_grid(theta, r)
        c, s = np.cos(theta)[None, :], np.sin(theta)[None, :]
        ex = g["e_r"] * c - g["e_theta"] * s
        ey = g["e_r"] * s + g["e_theta"] * c
        return ex, ey


def mirror_fields(fields):
    """exp(-i n theta) partner of an exp(+i n theta) harmonic."""
    flip = ("e_theta", "h_r", "h_z")
    return {k: (-v if k in flip else v) for k, v in fields.items()}


def circular_combination(even, odd=None, handedness=None):
    """OAM mode ``(even +- i odd)/sqrt(2)``; n = 0 modes pass through unchanged."""
    if even.azimuthal_order == 0:
        if odd is not None or handedness not in (None, "none"):
            raise IncompatibleConstituentsError("TE/TM modes have no circular partner")
        return OamMode(((even, 1.0 + 0j),), 0, "none", even.label)
    if odd is None:
        raise IncompatibleConstituentsError("hybrid modes need an odd partner")
    if handedness not in ("R", "L"):
        raise ValueError(f"handedness must be 'R' or 'L', got {handedness!r}")
    if (even.azimuthal_order, even.radial_index, even.family) != (
        odd.azimuthal_order, odd.radial_index, odd.family
    ):
        raise IncompatibleConstituentsError(f"cannot combine {even.label} with {odd.label}")
    if even.parity != "even" or odd.parity != "odd":
        raise IncompatibleConstituentsError("need one even and one odd constituent")
    if abs(even.beta - odd.beta) > 1e-9 * abs(even.beta):
        raise IncompatibleConstituentsError("even/odd beta differ beyond 1e-9 relative")
    sign = 1 if handedness == "R" else -1
    j = sign * even.azimuthal_order
    weights = ((even, 1 / np.sqrt(2) + 0j), (odd, sign * 1j / np.sqrt(2)))
    return OamMode(weights, winding_for(even.family, j), handedness, f"{even.label}_{handedness}")


def oam_mode(mode, handedness="none"):
    """OAM state of a finalized guided mode (builds the parity pair itself)."""
    if mode.azimuthal_order == 0:
        return circular_combination(mode)
    even, odd = mode.parity_pair()
    return circular_combination(even, odd, handedness)


def ring_radius(mode):
    """Mid radius of the highest-index layer, where OAM modes are sampled."""
    ep = mode.profile
    k = int(np.argmax(ep.eps))
    edges = np.concatenate([[0.0], ep.boundaries])
    if k >= len(ep.boundaries):
        return float(ep.boundaries[-1])
    return 0.5 * float(edges[k] + edges[k + 1])


def winding_from_samples(ex, ey, rel_margin=0.01):
    """Winding number from transverse samples on equally spaced azimuths.

    The dominant circular component is Fourier analysed and the integer
    frequency of its largest coefficient returned.  Raises
    :class:`AmbiguousWindingError` when the two circular components, or the two
    largest coefficients, are within `rel_margin` in power.
    """
    ex = np.asarray(ex, dtype=complex)
    ey = np.asarray(ey, dtype=complex)
    a_plus = (ex - 1j * ey) / np.sqrt(2)
    a_minus = (ex + 1j * ey) / np.sqrt(2)
    p_plus, p_minus = np.sum(np.abs(a_plus) ** 2), np.sum(np.abs(a_minus) ** 2)
    if abs(p_plus - p_minus) <= rel_margin * max(p_plus, p_minus):
        raise AmbiguousWindingError("circular components carry equal power")
    comp = a_plus if p_plus > p_minus else a_minus
    n = comp.size
    power = np.abs(np.fft.fft(comp) / n) ** 2
    freqs = np.rint(np.fft.fftfreq(n, 1.0 / n)).astype(int)
    order = np.argsort(power)[::-1]
    if power[order[1]] >= (1 - rel_margin) * power[order[0]]:
        raise AmbiguousWindingError("no dominant azimuthal coefficient")
    return int(freqs[order[0]])


def winding_number(mode, samples=256, radius=None):
    """Measured winding number of `mode` on a ring of `samples` azimuths."""
    r = ring_radius(mode.base) if radius is None else radius
    theta = 2 * np.pi * np.arange(samples) / samples
    ex, ey = mode.transverse_cartesian(theta, np.array([r]))
    return winding_from_samples(ex[0], ey[0])
