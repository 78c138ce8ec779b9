"""Cross-checks run by ``ringspdc validate``.

Each check yields a row ``(check, computed, reference, tolerance, passed)``.
Every tolerance is multiplied by ``tolerances.check_scale`` from the config.
A check that raises is reported as a failure rather than skipped.
"""

from __future__ import annotations

import itertools
from dataclasses import replace

import numpy as np

from .constants import wavelength_to_omega
from .materials import Material, build_profile, layered_profile
from .modes import DEFAULT_SETTINGS, axial_flux, find_modes, find_roots
from .oam import ModeKey, oam_mode, winding_number
from .oracle import FdGrid, fd_radial_modes, two_layer_reference
from .qpm import (
    PolingGrating,
    _family_roots,
    build_dispersion_table,
    grating_spectrum,
    grating_spectrum_quadrature,
    selection_allowed,
    tensor_charges,
)
from .special import check_reference_table
from .spdc import (
    _same_grid,
    cartesian_samples,
    integrate_samples,
    transverse_integral,
    transverse_integral_shortcut,
    units_audit,
)


def constant_material(index, name=None):
    """Non-dispersive glass (a single zero-resonance Sellmeier term)."""
    return Material(name or f"n={index}", ((index * index - 1.0, 0.0),))


def step_fixture(core=1.45, clad=1.445, radius=5.0, domain=None):
    return layered_profile([radius], [constant_material(core), constant_material(clad)], domain)


def _row(name, computed, reference, tol, passed=None):
    if passed is None:
        passed = bool(np.isfinite(computed) and computed <= tol)
    return {"check": name, "computed": float(computed), "reference": float(reference),
            "tolerance": float(tol), "passed": bool(passed)}


def check_bessel(cfg, scale):
    worst, failures = check_reference_table(cfg.tolerances.bessel_table, 1e-12 * scale)
    return _row("bessel_reference_table", worst, 0.0, 1e-12 * scale, not failures)


def check_two_layer(scale):
    prof = step_fixture(radius=6.0)
    w = float(wavelength_to_omega(1.55))
    worst = 0.0
    for nu in (0, 1, 2):
        ref = np.array(two_layer_reference(1.45, 1.445, 6.0, 1.55, nu))
        got = find_roots(prof, w, nu)
        if len(ref) != len(got):
            return _row("two_layer_crossval", np.inf, 0.0, 1e-8 * scale)
        worst = max(worst, np.max(np.abs(got - ref) / ref, initial=0.0))
    return _row("two_layer_crossval", worst, 0.0, 1e-8 * scale)


def check_fd_weak(scale):
    prof = step_fixture(radius=6.0, domain=48.0)
    fd = fd_radial_modes(prof, wavelength_to_omega(1.55), 0, FdGrid(48.0, 4000))
    ref = two_layer_reference(1.45, 1.445, 6.0, 1.55, 1)[0]
    return _row("fd_oracle_weak_guidance", abs(fd[0] - ref) / ref, 0.0, 1e-5 * scale)


def check_fd_ring(profile, scale):
    w = float(wavelength_to_omega(1.55))
    he11 = find_modes(profile, w, 1, 1)[0]
    fd = fd_radial_modes(profile, w, 0, FdGrid(profile.domain_radius, 4000))
    return _row("fd_oracle_ring_scalar_gap", abs(fd[0] - he11.beta) / he11.beta, 0.0, 1e-3 * scale)


def _reference_modes(profile, cfg):
    out = {}
    for lam in cfg.scan.mode_wavelengths:
        w = float(wavelength_to_omega(lam))
        for nu in cfg.scan.mode_orders:
            out[(lam, nu)] = list(find_modes(profile, w, nu, cfg.scan.max_modes,
                                             cfg.solver_settings()))
    return out


def check_mode_invariants(modes, scale):
    jumps, norm, ortho = 0.0, 0.0, 0.0
    for group in modes.values():
        for m in group:
            jumps = max(jumps, float(np.max(m.tangential_jumps())))
            norm = max(norm, abs(axial_flux(m.quadrature, m.fields).real - 1.0))
        for a, b in itertools.combinations(group, 2):
            x = axial_flux(a.quadrature, a.fields, b.fields)
            y = axial_flux(a.quadrature, b.fields, a.fields)
            ortho = max(ortho, abs(x + np.conj(y)) / 2)
    return [
        _row("boundary_residual", jumps, 0.0, 1e-8 * scale),
        _row("unit_power_normalization", norm, 0.0, 1e-6 * scale),
        _row("mode_orthogonality", ortho, 0.0, 1e-6 * scale),
    ]


def check_grid_refinement(profile, cfg, scale):
    w = float(wavelength_to_omega(1.55))
    settings = cfg.solver_settings()
    base = find_modes(profile, w, 1, 1, settings)[0]
    fine_settings = replace(settings, radial_points=2 * settings.radial_points)
    fine = find_modes(profile, w, 1, 1, fine_settings)[0]
    rows = [_row("beta_grid_independence", abs(fine.beta - base.beta), 0.0, 1e-10 * scale)]
    # overlap integral on both radial grids
    # design triple HE21_R -> HE21_R + HE11_R at a 1.5 um signal
    wp = float(wavelength_to_omega(cfg.pump.wavelength))
    ws = float(wavelength_to_omega(1.5))
    vals = []
    for st in (settings, fine_settings):
        p = oam_mode(find_modes(profile, wp, 2, 1, st)[0], "R")
        s = oam_mode(find_modes(profile, ws, 2, 1, st)[0], "R")
        i = oam_mode(find_modes(profile, wp - ws, 1, 1, st)[0], "R")
        tensor = PolingGrating(40.0).tensor()
        vals.append(transverse_integral(p, s, i, tensor))
    rows.append(_row("overlap_quadrature_convergence", abs(vals[1] - vals[0]) / abs(vals[0]),
                     0.0, 1e-8 * scale))
    return rows


def check_units(scale):
    chain = units_audit()
    worst = float(np.max(np.abs(chain["density"])))
    return _row("units_audit_density_dimensionless", worst, 0.0, 0.0, worst == 0.0)


def _oam_set(profile, omega, settings):
    out = []
    for nu in (0, 1, 2, 3):
        for mode in find_modes(profile, omega, nu, 8, settings):
            if nu == 0:
                out.append(oam_mode(mode))
            else:
                out.extend(oam_mode(mode, h) for h in ("R", "L"))
    return [m for m in out if abs(m.winding_number) <= 2]


def selection_rule_table(profile, lambda_s=1.5, pump_wavelength=0.775, settings=None,
                         grating=None):
    """All OAM triples with |l| <= 2: rows with the transverse integral magnitude."""
    settings = settings or DEFAULT_SETTINGS
    grating = grating or PolingGrating(40.0)
    tensor = grating.tensor()
    charges = tensor_charges(tensor)
    wp = float(wavelength_to_omega(pump_wavelength))
    ws = float(wavelength_to_omega(lambda_s))
    pumps = _oam_set(profile, wp, settings)
    signals = _oam_set(profile, ws, settings)
    idlers = _oam_set(profile, wp - ws, settings)
    quad = _same_grid(*pumps, *signals, *idlers)
    pf = [cartesian_samples(m) for m in pumps]
    sf = [[c.conj() for c in cartesian_samples(m)] for m in signals]
    if_ = [[c.conj() for c in cartesian_samples(m)] for m in idlers]
    rows = []
    for p, pc in zip(pumps, pf):
        for s, sc in zip(signals, sf):
            for i, ic in zip(idlers, if_):
                rows.append({
                    "pump": p.label, "signal": s.label, "idler": i.label,
                    "allowed": selection_allowed(p.key, s.key, i.key, charges),
                    "oam_rule": p.winding_number == s.winding_number + i.winding_number,
                    "magnitude": abs(integrate_samples(quad, pc, sc, ic, tensor)),
                })
    return rows


def check_selection(profile, cfg, scale):
    rows = selection_rule_table(profile, 1.5, cfg.pump.wavelength, cfg.solver_settings())
    allowed = max(r["magnitude"] for r in rows if r["allowed"])
    forbidden = max((r["magnitude"] for r in rows if not r["allowed"]), default=0.0)
    return _row("selection_rule", forbidden / allowed, 0.0, 1e-12 * scale)


def check_overlap_oracle(profile, cfg, scale, triples=20, seed=7):
    rng = np.random.default_rng(seed)
    settings = cfg.solver_settings()
    wp = float(wavelength_to_omega(cfg.pump.wavelength))
    diffs, scale_ref = [], 0.0
    tensor = PolingGrating(40.0).tensor()
    sets = {}
    for _ in range(triples):
        lam = float(rng.uniform(1.40, 1.65))
        ws = float(wavelength_to_omega(round(lam, 3)))
        if ws not in sets:
            sets[ws] = (_oam_set(profile, ws, settings), _oam_set(profile, wp - ws, settings))
        if wp not in sets:
            sets[wp] = (_oam_set(profile, wp, settings), None)
        p = sets[wp][0][rng.integers(len(sets[wp][0]))]
        s = sets[ws][0][rng.integers(len(sets[ws][0]))]
        i = sets[ws][1][rng.integers(len(sets[ws][1]))]
        a = transverse_integral(p, s, i, tensor)
        b = transverse_integral_shortcut(p, s, i, tensor)
        diffs.append(abs(a - b))
        scale_ref = max(scale_ref, abs(a), abs(b))
    # forbidden triples vanish, so errors are measured against the allowed magnitude
    worst = max(diffs) / scale_ref if scale_ref > 0 else np.inf
    return _row("overlap_full_vs_shortcut", worst, 0.0, 1e-8 * scale)


def check_grating(scale, seed=3):
    g = PolingGrating(42.9, 0.01)
    rng = np.random.default_rng(seed)
    q = rng.uniform(-0.3, 0.3, 100)
    q[:5] = 2 * np.pi / 42.9 + rng.uniform(-1e-3, 1e-3, 5)
    closed = grating_spectrum(g, q)
    quad = grating_spectrum_quadrature(g, q, panels=200000)
    peak = abs(grating_spectrum(g, 2 * np.pi / 42.9))
    err = np.max(np.abs(closed - quad)) / peak
    return _row("grating_closed_form_vs_quadrature", err, 0.0, 1e-6 * scale)


def check_dispersion_table(profile, cfg, scale):
    w_lo, w_hi = wavelength_to_omega(np.array([1.6, 1.5]))
    key = ModeKey.parse("HE21_R")
    table = build_dispersion_table(profile, key, w_lo, w_hi, points=cfg.tolerances.table_points
                                   // 10, settings=cfg.solver_settings())
    worst = 0.0
    for k in (3, len(table.omega) // 2, len(table.omega) - 5):
        w = 0.5 * (table.omega[k] + table.omega[k + 1])
        b, _ = _family_roots(build_profile(profile, w), w, key, cfg.solver_settings())
        worst = max(worst, abs(b - table(w)))
    return _row("dispersion_table_interpolation", worst, 0.0, 1e-9 * scale)


def check_winding(modes, scale):
    he21 = [m for (lam, nu), g in modes.items() for m in g if m.label == "HE21"]
    if not he21:
        return _row("winding_number_HE21", np.inf, 1.0, 0.0, False)
    r = winding_number(oam_mode(he21[0], "R"))
    left = winding_number(oam_mode(he21[0], "L"))
    return _row("winding_number_HE21", abs(r - 1) + abs(left + 1), 0.0, 0.0, r == 1 and left == -1)


CHECK_GROUPS = (
    "bessel", "two_layer", "fd_weak", "fd_ring", "mode_invariants", "winding",
    "grid_refinement", "units", "selection_rule", "overlap_oracle", "grating",
    "dispersion_table",
)


def run_checks(cfg, only=None):
    """Run the check groups (all, or those named in `only`); returns the rows."""
    only = set(only or CHECK_GROUPS)
    unknown = only - set(CHECK_GROUPS)
    if unknown:
        raise ValueError(f"unknown check group(s): {', '.join(sorted(unknown))}")
    scale = cfg.tolerances.check_scale
    profile = cfg.profile()
    rows = []
    modes = {}

    def modes_needed():
        if not modes:
            modes.update(_reference_modes(profile, cfg))
        return modes

    groups = {
        "bessel": lambda: check_bessel(cfg, scale),
        "two_layer": lambda: check_two_layer(scale),
        "fd_weak": lambda: check_fd_weak(scale),
        "fd_ring": lambda: check_fd_ring(profile, scale),
        "mode_invariants": lambda: check_mode_invariants(modes_needed(), scale),
        "winding": lambda: check_winding(modes_needed(), scale),
        "grid_refinement": lambda: check_grid_refinement(profile, cfg, scale),
        "units": lambda: check_units(scale),
        "selection_rule": lambda: check_selection(profile, cfg, scale),
        "overlap_oracle": lambda: check_overlap_oracle(profile, cfg, scale),
        "grating": lambda: check_grating(scale),
        "dispersion_table": lambda: check_dispersion_table(profile, cfg, scale),
    }
    for name in CHECK_GROUPS:
        if name not in only:
            continue
        try:
            out = groups[name]()
        except Exception as exc:  # a crashing check is a failing check
            out = {"check": name, "computed": float("nan"), "reference": 0.0,
                   "tolerance": 0.0, "passed": False, "error": str(exc)}
        rows.extend(out if isinstance(out, list) else [out])
    return rows


CHECK_COLUMNS = ("check", "computed", "reference", "tolerance", "passed")
