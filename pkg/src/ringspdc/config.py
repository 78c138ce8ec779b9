"""Run configuration: a commented INI file parsed into immutable blocks.

Example (the bundled ``reference_ring_fiber.ini``)::

    [fiber]
    radii = 4.5, 5.5
    materials = silica, germanosilicate_19p3, silica

    [grating]
    design_target = 1.5
    length = 1.0

Exactly one of ``grating.period`` and ``grating.design_target`` must be
given.  Material names resolve against the material data file
(``fiber.materials_file`` or the bundled default).
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

from .materials import MaterialError, ProfileError, layered_profile, load_materials
from .oam import ModeKey
from .qpm import ProcessSpec


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _floats(text, where):
    try:
        return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated numbers, got {text!r}") from None


def _ints(text, where):
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"{where}: expected comma-separated integers, got {text!r}") from None


def _names(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _fmt(value):
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, ModeKey):
        return value.label
    return str(value)


@dataclass(frozen=True)
class FiberBlock:
    radii: tuple = (4.5, 5.5)
    materials: tuple = ("silica", "germanosilicate_19p3", "silica")
    domain_radius: float = None
    materials_file: str = None


@dataclass(frozen=True)
class GratingBlock:
    period: float = None
    design_target: float = None
    design_process: str = "HE21_R -> HE21_R + HE11_R"
    order: int = 1
    duty: float = 0.5
    length: float = 1.0
    profile: str = "rectangular_on_off"
    chi_xxx: float = 0.063
    chi_xyy: float = 0.021


@dataclass(frozen=True)
class PumpBlock:
    wavelength: float = 0.775
    power: float = 1e-6
    mode: str = "HE21_R"
    leakage_te01: float = 0.0
    leakage_tm01: float = 0.0
    spectrum: str = "monochromatic"
    sigma: float = None
    repetition_rate: float = 80e6


@dataclass(frozen=True)
class ScanBlock:
    band: tuple = (1.35, 1.70)
    points: int = 4000
    signal_modes: tuple = ("HE21_R", "HE11_R", "HE11_L", "TE01", "TM01")
    idler_modes: tuple = ("HE21_R", "HE11_R", "HE11_L", "TE01", "TM01")
    processes: tuple = (
        "HE21_R -> HE21_R + HE11_R",
        "HE21_R -> TE01 + HE11_R",
        "HE21_R -> TM01 + HE11_R",
    )
    mode_wavelengths: tuple = (0.775, 1.55)
    mode_orders: tuple = (0, 1, 2, 3)
    max_modes: int = 8
    separation_halfwidth: float = 0.01
    rate_band_fwhm: float = 15.0
    shorter_length: float = 0.1


@dataclass(frozen=True)
class TolerancesBlock:
    root_tolerance: float = 1e-12
    scan_points: int = 2000
    quadrature_points: int = 2000
    table_points: int = 2000
    overlap_points: int = 25
    check_scale: float = 1.0
    bessel_table: str = None


_BLOCKS = {
    "fiber": FiberBlock,
    "grating": GratingBlock,
    "pump": PumpBlock,
    "scan": ScanBlock,
    "tolerances": TolerancesBlock,
}


@dataclass(frozen=True)
class RunConfig:
    fiber: FiberBlock = field(default_factory=FiberBlock)
    grating: GratingBlock = field(default_factory=lambda: GratingBlock(design_target=1.5))
    pump: PumpBlock = field(default_factory=PumpBlock)
    scan: ScanBlock = field(default_factory=ScanBlock)
    tolerances: TolerancesBlock = field(default_factory=TolerancesBlock)
    source: str = field(default=None, compare=False)

    # -- derived objects

    def materials(self):
        path = self.fiber.materials_file
        if path and self.source and not Path(path).is_absolute():
            path = str(Path(self.source).parent / path)
        return load_materials(path)

    def profile(self):
        mats = self.materials()
        return layered_profile(self.fiber.radii, [mats[n] for n in self.fiber.materials],
                               self.fiber.domain_radius)

    def processes(self):
        return [ProcessSpec.parse(p) for p in self.scan.processes]

    def design_process(self):
        return ProcessSpec.parse(self.grating.design_process)

    def solver_settings(self):
        from .modes import SolverSettings
        t = self.tolerances
        return SolverSettings(scan_points=t.scan_points, beta_tol=t.root_tolerance,
                              radial_points=t.quadrature_points)

    def to_text(self):
        parser = configparser.ConfigParser(interpolation=None)
        for name in _BLOCKS:
            block = getattr(self, name)
            parser[name] = {
                f.name: ("; ".join(getattr(block, f.name)) if f.name == "processes"
                         else _fmt(getattr(block, f.name)))
                for f in fields(block) if getattr(block, f.name) is not None
            }
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def digest(self):
        return hashlib.sha256(self.to_text().encode()).hexdigest()

    def with_values(self, block, **values):
        return replace(self, **{block: replace(getattr(self, block), **values)})


def _convert(block_cls, name, raw, where):
    default = next(f.default for f in fields(block_cls) if f.name == name)
    hint = next(f.type for f in fields(block_cls) if f.name == name)
    if raw.strip() == "":
        return None
    if name in ("radii", "band", "mode_wavelengths"):
        return _floats(raw, where)
    if name == "mode_orders":
        return _ints(raw, where)
    if name == "processes":
        return tuple(p.strip() for p in raw.split(";") if p.strip())
    if name in ("materials", "signal_modes", "idler_modes"):
        return _names(raw)
    if hint in ("int",) or isinstance(default, int) and not isinstance(default, bool):
        return _ints(raw, where)[0]
    if hint in ("float",) or isinstance(default, float):
        vals = _floats(raw, where)
        if len(vals) != 1:
            raise ConfigError(f"{where}: expected one number, got {raw!r}")
        return vals[0]
    return raw.strip()


def parse_config(text, source=None):
    """Parse INI `text` into a validated :class:`RunConfig`."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"unreadable config: {exc}") from None
    blocks = {}
    for section in parser.sections():
        if section not in _BLOCKS:
            raise ConfigError(f"[{section}]: unknown section")
    for name, cls in _BLOCKS.items():
        values = {}
        if parser.has_section(name):
            known = {f.name for f in fields(cls)}
            for key, raw in parser[name].items():
                if key not in known:
                    raise ConfigError(f"{name}.{key}: unknown field")
                values[key] = _convert(cls, key, raw, f"{name}.{key}")
        blocks[name] = cls(**values)
    cfg = RunConfig(**blocks, source=str(source) if source else None)
    validate_config(cfg)
    return cfg


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, source=path)


def reference_config_path():
    return Path(str(resources.files("ringspdc") / "data" / "reference_ring_fiber.ini"))


def reference_config():
    return load_config(reference_config_path())


def validate_config(cfg):
    g = cfg.grating
    if (g.period is None) == (g.design_target is None):
        raise ConfigError("grating: exactly one of period / design_target is required")
    if g.period is not None and not g.period > 0:
        raise ConfigError("grating.period: must be positive")
    if not g.length > 0:
        raise ConfigError("grating.length: must be positive")
    if not 0 < g.duty < 1:
        raise ConfigError("grating.duty: must lie in (0, 1)")
    if g.order < 1 or g.order % 2 == 0:
        raise ConfigError("grating.order: must be an odd positive integer")
    if g.profile not in ("rectangular_on_off", "uniform"):
        raise ConfigError(f"grating.profile: unknown profile {g.profile!r}")
    f = cfg.fiber
    if len(f.materials) != len(f.radii) + 1:
        raise ConfigError(
            f"fiber.materials: need {len(f.radii) + 1} names for {len(f.radii)} radii"
        )
    try:
        mats = cfg.materials()
    except (OSError, MaterialError) as exc:
        raise ConfigError(f"fiber.materials_file: {exc}") from None
    for name in f.materials:
        if name not in mats:
            raise ConfigError(f"fiber.materials: unknown material {name!r}")
    try:
        cfg.profile()
    except ProfileError as exc:
        raise ConfigError(f"fiber.radii: {exc}") from None
    p = cfg.pump
    if not p.power > 0:
        raise ConfigError("pump.power: must be positive")
    if p.spectrum not in ("monochromatic", "gaussian"):
        raise ConfigError(f"pump.spectrum: unknown spectrum {p.spectrum!r}")
    if p.spectrum == "gaussian" and not (p.sigma and p.sigma > 0):
        raise ConfigError("pump.sigma: required and positive for a gaussian pump")
    if p.leakage_te01 < 0 or p.leakage_tm01 < 0 or p.leakage_te01 + p.leakage_tm01 >= 1:
        raise ConfigError("pump.leakage_*: fractions must be >= 0 and sum below 1")
    for where, labels in (("pump.mode", (p.mode,)), ("scan.signal_modes", cfg.scan.signal_modes),
                          ("scan.idler_modes", cfg.scan.idler_modes)):
        for label in labels:
            try:
                ModeKey.parse(label)
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}") from None
    for where, items in (("scan.processes", cfg.scan.processes),
                         ("grating.design_process", (g.design_process,))):
        for text in items:
            try:
                ProcessSpec.parse(text)
            except ValueError as exc:
                raise ConfigError(f"{where}: {exc}") from None
    s = cfg.scan
    if len(s.band) != 2 or not 0.4 <= s.band[0] < s.band[1] <= 2.0:
        raise ConfigError("scan.band: need two increasing wavelengths inside 0.4-2.0 um")
    if s.points < 2:
        raise ConfigError("scan.points: need at least 2")
    if any(o < 0 or o > 4 for o in s.mode_orders):
        raise ConfigError("scan.mode_orders: azimuthal orders must lie in 0-4")
    t = cfg.tolerances
    if not t.root_tolerance > 0 or not t.check_scale > 0:
        raise ConfigError("tolerances: root_tolerance and check_scale must be positive")
    return cfg
