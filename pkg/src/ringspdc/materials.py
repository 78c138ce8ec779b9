"""Material dispersion and the piecewise radial permittivity profile.

Refractive indices come from three-term Sellmeier sums whose coefficients live in
a bundled key-value data file (``data/materials.ini``).  Doped silica is derived
by linear interpolation of every Sellmeier coefficient between pure silica and
pure GeO2 according to the molar fraction.  The data file can be replaced by
setting the ``RINGSPDC_MATERIALS`` environment variable.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .constants import wavelength_to_omega, omega_to_wavelength

SUPPORTED_BAND_UM = (0.4, 2.0)
MATERIALS_ENV = "RINGSPDC_MATERIALS"
DEFAULT_DOMAIN_FACTOR = 3.0


class MaterialError(ValueError):
    """Invalid material definition or a Sellmeier sum with a negative radicand."""


class WavelengthDomainError(ValueError):
    """Wavelength outside the band covered by the dispersion data."""


class ProfileError(ValueError):
    """Radial profile violating one of its geometric invariants."""


@dataclass(frozen=True)
class Material:
    """Glass described by a Sellmeier term list.

    Parameters
    ----------
    name : str
        Label used to reference the material from configuration files.
    sellmeier_terms : tuple of (float, float)
        ``(B_k, lambda_k)`` pairs, strength and resonance wavelength in um.
        A zero resonance wavelength gives a non-dispersive term.
    dopant_molar_fraction : float
        GeO2 molar fraction in [0, 1].
    """

    name: str
    sellmeier_terms: tuple
    dopant_molar_fraction: float = 0.0
    source: str = field(default="", compare=False)

    def __post_init__(self):
        terms = tuple((float(b), float(lam)) for b, lam in self.sellmeier_terms)
        object.__setattr__(self, "sellmeier_terms", terms)
        if not terms:
            raise MaterialError(f"material {self.name!r} has no Sellmeier terms")
        for b, lam in terms:
            if b < 0:
                raise MaterialError(f"material {self.name!r}: negative strength {b}")
            if lam < 0:
                raise MaterialError(f"material {self.name!r}: negative resonance {lam}")
        if not 0.0 <= self.dopant_molar_fraction <= 1.0:
            raise MaterialError(
                f"material {self.name!r}: molar fraction {self.dopant_molar_fraction} "
                "outside [0, 1]"
            )

    def index(self, wavelength):
        return sellmeier_index(self, wavelength)


def sellmeier_index(material, wavelength, check_band=True):
    """Refractive index of `material` at vacuum `wavelength` (um).

    Accepts scalars or arrays.  Raises :class:`WavelengthDomainError` outside
    0.4-2.0 um unless `check_band` is false.
    """
    lam = np.asarray(wavelength, dtype=float)
    if check_band:
        lo, hi = SUPPORTED_BAND_UM
        if np.any(lam < lo) or np.any(lam > hi) or not np.all(np.isfinite(lam)):
            raise WavelengthDomainError(
                f"wavelength {wavelength} um outside supported band {lo}-{hi} um"
            )
    lam2 = lam * lam
    n2 = np.ones_like(lam)
    for b, res in material.sellmeier_terms:
        n2 = n2 + b * lam2 / (lam2 - res * res)
    if np.any(n2 <= 0):
        raise MaterialError(f"material {material.name!r}: negative radicand at {wavelength} um")
    n = np.sqrt(n2)
    return float(n) if n.ndim == 0 else n


def interpolate_material(base, dopant, fraction, name=None, source=""):
    """Mix two Sellmeier sets by linear interpolation of each coefficient."""
    if len(base.sellmeier_terms) != len(dopant.sellmeier_terms):
        raise MaterialError("base and dopant term lists differ in length")
    if not 0.0 <= fraction <= 1.0:
        raise MaterialError(f"molar fraction {fraction} outside [0, 1]")
    terms = tuple(
        (b0 + fraction * (b1 - b0), l0 + fraction * (l1 - l0))
        for (b0, l0), (b1, l1) in zip(base.sellmeier_terms, dopant.sellmeier_terms)
    )
    return Material(name or f"{base.name}+{fraction:g}{dopant.name}", terms, fraction, source)


def _parse_terms(text, where):
    terms = []
    for chunk in text.split(","):
        parts = chunk.split()
        if len(parts) != 2:
            raise MaterialError(f"{where}: bad Sellmeier term {chunk.strip()!r}")
        terms.append((float(parts[0]), float(parts[1])))
    return tuple(terms)


def default_materials_path():
    env = os.environ.get(MATERIALS_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("ringspdc") / "data" / "materials.ini"))


def load_materials(path=None):
    """Read a material data file into a ``{name: Material}`` mapping."""
    path = Path(path) if path is not None else default_materials_path()
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    with open(path) as fh:
        parser.read_file(fh)

    raw = {name: dict(parser[name]) for name in parser.sections()}
    out = {}

    def resolve(name, stack=()):
        if name in out:
            return out[name]
        if name not in raw:
            raise MaterialError(f"material {name!r} not defined in {path}")
        if name in stack:
            raise MaterialError(f"circular material definition at {name!r}")
        block = raw[name]
        source = block.get("source", "")
        if "terms" in block:
            mat = Material(
                name,
                _parse_terms(block["terms"], f"{path}[{name}]"),
                float(block.get("fraction", 0.0)),
                source,
            )
        elif "base" in block and "dopant" in block:
            base = resolve(block["base"], stack + (name,))
            dopant = resolve(block["dopant"], stack + (name,))
            mat = interpolate_material(base, dopant, float(block["fraction"]), name, source)
        else:
            raise MaterialError(f"{path}[{name}]: need 'terms' or 'base'+'dopant'")
        out[name] = mat
        return mat

    for name in raw:
        resolve(name)
    return out


@dataclass(frozen=True)
class Layer:
    r_inner: float
    r_outer: float
    material: Material


@dataclass(frozen=True)
class RadialPermittivityProfile:
    """Concentric annular layers plus a semi-infinite cladding.

    `domain_radius` truncates the transverse plane for quadratures and sampled
    exports; it defaults to three times the outermost layer radius.
    """

    layers: tuple
    outer_material: Material
    domain_radius: float = None

    def __post_init__(self):
        layers = tuple(self.layers)
        object.__setattr__(self, "layers", layers)
        if not layers:
            raise ProfileError("profile needs at least one layer")
        if layers[0].r_inner != 0.0:
            raise ProfileError(f"first layer must start at r=0, got {layers[0].r_inner}")
        for k, layer in enumerate(layers):
            if not layer.r_outer > layer.r_inner:
                raise ProfileError(f"layer {k} has non-positive thickness")
            if k + 1 < len(layers) and layers[k + 1].r_inner != layer.r_outer:
                raise ProfileError(
                    f"layers {k} and {k + 1} not contiguous: "
                    f"{layer.r_outer} != {layers[k + 1].r_inner}"
                )
        outer = layers[-1].r_outer
        if self.domain_radius is None:
            object.__setattr__(self, "domain_radius", DEFAULT_DOMAIN_FACTOR * outer)
        elif not self.domain_radius > outer:
            raise ProfileError(
                f"domain radius {self.domain_radius} must exceed outer boundary {outer}"
            )

    @property
    def boundaries(self):
        return np.array([layer.r_outer for layer in self.layers])

    @property
    def materials(self):
        return [layer.material for layer in self.layers] + [self.outer_material]

    def permittivity(self, omega):
        return build_profile(self, omega).eps


@dataclass(frozen=True)
class EvaluatedProfile:
    """Per-region relative permittivity at one angular frequency.

    ``eps[k]`` belongs to region ``k``; the last entry is the cladding.
    """

    omega: float
    boundaries: np.ndarray
    eps: np.ndarray

    @property
    def k0(self):
        return 2 * np.pi / omega_to_wavelength(self.omega)

    @property
    def index(self):
        return np.sqrt(self.eps)

    def eps_at(self, r):
        r = np.asarray(r, dtype=float)
        return self.eps[np.searchsorted(self.boundaries, r, side="right")]


def build_profile(profile, omega):
    """Evaluate the layer permittivities of `profile` at angular frequency `omega` (rad/s)."""
    lam = omega_to_wavelength(omega)
    eps = np.array([sellmeier_index(m, lam) ** 2 for m in profile.materials])
    if np.any(eps <= 0):
        raise ProfileError("non-positive permittivity")
    return EvaluatedProfile(float(omega), profile.boundaries.copy(), eps)


def layered_profile(radii, materials, domain_radius=None):
    """Build a profile from outer radii and ``len(radii) + 1`` materials (last is cladding)."""
    radii = [float(r) for r in radii]
    if len(materials) != len(radii) + 1:
        raise ProfileError(
            f"need {len(radii) + 1} materials for {len(radii)} radii, got {len(materials)}"
        )
    inner = [0.0] + radii[:-1]
    layers = tuple(Layer(a, b, m) for a, b, m in zip(inner, radii, materials))
    return RadialPermittivityProfile(layers, materials[-1], domain_radius)


def index_at_wavelength(profile, wavelength):
    return build_profile(profile, wavelength_to_omega(wavelength)).index
