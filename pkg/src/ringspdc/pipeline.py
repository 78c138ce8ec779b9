"""Config-driven runs shared by the CLI and the acceptance tests."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constants import wavelength_to_omega
from .modes import find_modes
from .oam import ModeKey, oam_mode
from .qpm import (
    DispersionCache,
    PolingGrating,
    delta_beta_scan,
    design_period,
    main_lobe_fwhm,
    process_separation,
)
from .spdc import (
    PumpSpec,
    SpdcModel,
    coefficient_grid,
    correlation_time,
    pair_rate_report,
)


@dataclass
class Setup:
    config: object
    profile: object
    cache: DispersionCache
    grating: PolingGrating
    model: SpdcModel

    @property
    def period(self):
        return self.grating.period


def _pump(cfg):
    p = cfg.pump
    leakage = {}
    if p.leakage_te01 > 0:
        leakage["TE01"] = p.leakage_te01
    if p.leakage_tm01 > 0:
        leakage["TM01"] = p.leakage_tm01
    return PumpSpec(p.wavelength, p.power, p.mode, p.spectrum, p.sigma, p.repetition_rate,
                    leakage)


def build_setup(cfg, threads=1):
    """Profile, dispersion tables, grating (designed if requested) and SPDC model."""
    profile = cfg.profile()
    cache = DispersionCache(profile, cfg.scan.band, cfg.pump.wavelength,
                            points=cfg.tolerances.table_points,
                            settings=cfg.solver_settings(), threads=threads)
    keys = {ModeKey.parse(k) for k in cfg.scan.signal_modes + cfg.scan.idler_modes}
    for proc in cfg.processes() + [cfg.design_process()]:
        keys |= {proc.signal, proc.idler}
    cache.prepare(sorted(keys))
    g = cfg.grating
    period = g.period
    if period is None:
        period = design_period(cfg.design_process(), g.design_target, cache, g.order)
    grating = PolingGrating(period, g.length, g.chi_xxx, g.chi_xyy, g.duty, g.profile)
    model = SpdcModel(cache, grating, _pump(cfg), cfg.tolerances.overlap_points)
    return Setup(cfg, profile, cache, grating, model)


def mode_rows(cfg):
    """Mode table: one row per OAM state (hybrid modes appear as R and L)."""
    profile = cfg.profile()
    settings = cfg.solver_settings()
    rows, notes = [], []
    for lam in cfg.scan.mode_wavelengths:
        w = float(wavelength_to_omega(lam))
        for nu in cfg.scan.mode_orders:
            found = find_modes(profile, w, nu, cfg.scan.max_modes, settings)
            notes.extend(found.warnings)
            for mode in found:
                hands = ("none",) if nu == 0 else ("R", "L")
                for hand in hands:
                    oam = oam_mode(mode, hand)
                    rows.append({
                        "lambda_um": float(lam),
                        "n": nu,
                        "m": mode.radial_index,
                        "family": mode.family,
                        "parity": "none" if nu == 0 else ("even+i*odd" if hand == "R" else "even-i*odd"),
                        "beta_rad_per_um": mode.beta,
                        "n_eff": mode.n_eff,
                        "l": oam.winding_number,
                        "handedness": hand,
                    })
    if not rows:
        notes.append("no guided modes found")
    return rows, notes


def spectrum_run(setup, with_correlation=True, with_shorter=True):
    """Delta-beta scan, signal densities and the rate report for one setup."""
    cfg = setup.config
    model = setup.model
    lam = np.linspace(*cfg.scan.band, cfg.scan.points)
    processes = cfg.processes()
    db_rows = delta_beta_scan(processes, lam, setup.cache)
    idlers = [ModeKey.parse(k) for k in cfg.scan.idler_modes]
    densities = {}
    for sk in cfg.scan.signal_modes:
        densities[sk] = model.signal_density(sk, lam, idlers)
    target = cfg.design_process()
    notes = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        report = pair_rate_report(model, target, idlers=_idlers_for(target, idlers),
                                  band_fwhm=cfg.scan.rate_band_fwhm, lambda_grid=lam)
    notes.extend(str(w.message) for w in caught)
    report["peaks"] = {k: d.peak()[0] for k, d in densities.items()}
    report["selection_rule"] = {
        p.label: {"allowed": bool(p.allowed), "oam_rule_satisfied": bool(p.oam_conserved)}
        for p in processes
    }
    report["period_um"] = setup.period
    report["grating_length_m"] = setup.grating.length
    report["grating_fwhm_per_um"] = main_lobe_fwhm(setup.grating)
    hw = cfg.scan.separation_halfwidth
    peak = report["peak_lambda_um"]
    report["separation"] = process_separation(
        [target] + [p for p in processes if p != target], setup.grating, (peak - hw, peak + hw),
        setup.cache,
    )
    if with_correlation:
        grid = coefficient_grid(peak, report["fwhm_nm"])
        joint = model.joint_amplitude(
            [(target.signal, i) for i in _idlers_for(target, idlers)], grid
        )
        report["correlation_ps"] = correlation_time(joint) * 1e12
    if with_shorter and cfg.scan.shorter_length:
        short = model.with_grating(setup.grating.with_length(cfg.scan.shorter_length))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            r2 = pair_rate_report(short, target, idlers=_idlers_for(target, idlers),
                                  band_fwhm=cfg.scan.rate_band_fwhm, lambda_grid=lam)
        report["shorter_length_m"] = cfg.scan.shorter_length
        report["shorter_pairs_per_s"] = r2["pairs_per_s"]
        report["rate_ratio"] = report["pairs_per_s"] / r2["pairs_per_s"]
    report["warnings"] = sorted(set(report.get("warnings", []) + notes))
    return db_rows, densities, report


def _idlers_for(process, idlers):
    """Idler candidates sharing the process idler's spatial mode."""
    same = [k for k in idlers if (k.family, k.n, k.m) == (process.idler.family, process.idler.n,
                                                           process.idler.m)]
    return same or [process.idler]


def density_rows(densities):
    rows = []
    for label, d in densities.items():
        per_nm = d.density_per_nm
        for lam, v, vn in zip(d.wavelength, d.density, per_nm):
            rows.append({
                "lambda_s_um": float(lam),
                "mode_label": label,
                "density_per_s_per_rad_s": float(v),
                "density_per_s_per_nm": float(vn),
            })
    return rows


def design_run(setup):
    cfg = setup.config
    target = cfg.design_process()
    lam_t = cfg.grating.design_target
    if lam_t is None:
        lam_t = float(setup.model.signal_density(
            target.signal, np.linspace(*cfg.scan.band, cfg.scan.points),
            _idlers_for(target, [target.idler]),
        ).peak()[0])
    hw = cfg.scan.separation_halfwidth
    others = [p for p in cfg.processes() if p != target]
    return {
        "process": target.label,
        "lambda_target_um": lam_t,
        "Lambda_um": setup.period,
        "order": cfg.grating.order,
        "length_m": setup.grating.length,
        "suppression": process_separation([target] + others, setup.grating,
                                          (lam_t - hw, lam_t + hw), setup.cache),
    }
