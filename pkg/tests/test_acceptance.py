"""Acceptance criteria on the bundled reference ring fiber.

Each test records one PASS/FAIL line (shown in the terminal summary) before
asserting, so a failing criterion still reports its measured numbers.
"""

import time
import warnings

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ringspdc.oam import ModeKey
from ringspdc.qpm import DispersionCache, design_period, main_lobe_fwhm, process_separation
from ringspdc.spdc import coefficient_grid, correlation_time, peak_fwhm
from ringspdc.validate import run_checks, selection_rule_table

pytestmark = pytest.mark.acceptance


def record(number, checks, detail, seconds):
    """Log the criterion line; `checks` maps clause name to bool."""
    ok = all(checks.values())
    failed = [k for k, v in checks.items() if not v]
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.1f} s]"
    if failed:
        line += f"  failed: {', '.join(failed)}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok, failed


def test_criterion_1_selection_rule(ref_config, ref_profile):
    t0 = time.perf_counter()
    rows = selection_rule_table(ref_profile, 1.5, ref_config.pump.wavelength, ref_config.solver_settings())
    seconds = time.perf_counter() - t0
    allowed = max(r["magnitude"] for r in rows if r["allowed"])
    forbidden = max(r["magnitude"] for r in rows if not r["allowed"])
    ratio = forbidden / allowed
    ok, failed = record(1, {"forbidden/allowed < 1e-12": ratio < 1e-12, "runtime < 60 s": seconds < 60},
                        f"{len(rows)} triples, max forbidden/allowed |I| = {ratio:.2e}", seconds)
    assert ok, failed


@pytest.mark.xfail(strict=True, reason="TE01/TM01 and EH modes couple under the total angular "
                   "momentum rule while breaking the bare winding-number sum")
def test_criterion_1_literal_winding_rule(ref_config, ref_profile):
    rows = selection_rule_table(ref_profile, 1.5, ref_config.pump.wavelength, ref_config.solver_settings())
    allowed = max(r["magnitude"] for r in rows)
    worst = max(r["magnitude"] for r in rows if not r["oam_rule"])
    assert worst < 1e-12 * allowed


def test_criterion_2_qpm_design(ref_config, ref_profile):
    t0 = time.perf_counter()
    proc = ref_config.design_process()
    cache = DispersionCache(ref_profile, ref_config.scan.band, ref_config.pump.wavelength,
                            points=ref_config.tolerances.table_points,
                            settings=ref_config.solver_settings(), threads=2)
    cache.prepare([proc.signal, proc.idler])
    period = design_period(proc, 1.5, cache)
    seconds = time.perf_counter() - t0
    ok, failed = record(2, {"within 15 % of 42.9 um": abs(period / 42.9 - 1) <= 0.15,
                            "runtime < 60 s": seconds < 60},
                        f"Lambda = {period:.3f} um ({period / 42.9 - 1:+.2%} vs 42.9 um)", seconds)
    assert ok, failed


def test_criterion_3_peak_structure(ref_setup, ref_spectrum):
    densities, seconds = ref_spectrum[1], ref_setup.build_seconds + ref_spectrum[3]
    peaks = {k: d.peak()[0] for k, d in densities.items()}
    order = [("TM01", 1.400), ("HE21_R", 1.500), ("HE11_R", 1.603), ("TE01", 1.635)]
    found = [peaks[k] for k, _ in order]
    checks = {"strict ordering": all(a < b for a, b in zip(found, found[1:])),
              "HE11 peak common to R and L": abs(peaks["HE11_R"] - peaks["HE11_L"]) < 1e-3,
              "runtime < 300 s": seconds < 300}
    for (k, ref), lam in zip(order, found):
        checks[f"{k} within 30 nm of {ref}"] = abs(lam - ref) <= 0.030
    detail = ", ".join(f"{k} {lam:.4f}" for (k, _), lam in zip(order, found))
    ok, failed = record(3, checks, detail, seconds)
    assert ok, failed


def test_criterion_4_longitudinal_spectrum(ref_setup):
    t0 = time.perf_counter()
    g = ref_setup.grating
    widths = {length: main_lobe_fwhm(g.with_length(length)) for length in (0.01, 0.1, 1.0)}
    seconds = time.perf_counter() - t0
    products = np.array([w * length for length, w in widths.items()])
    spread = products.max() / products.min() - 1
    w1 = widths[1.0]
    ok, failed = record(4, {"within x1.5 of 7.6e-6": 1 / 1.5 <= w1 / 7.6e-6 <= 1.5,
                            "1/L scaling within 1 %": spread < 0.01, "runtime < 10 s": seconds < 10},
                        f"FWHM(1 m) = {w1:.3e} /um, FWHM*L spread {spread:.1e}", seconds)
    assert ok, failed


def test_criterion_5_process_separation(ref_setup, ref_spectrum):
    t0 = time.perf_counter()
    cfg = ref_setup.config
    target = cfg.design_process()
    peak = ref_spectrum[2]["peak_lambda_um"]
    hw = cfg.scan.separation_halfwidth
    rows = process_separation([target] + [p for p in cfg.processes() if p != target], ref_setup.grating,
                              (peak - hw, peak + hw), ref_setup.cache)
    seconds = time.perf_counter() - t0
    worst = max(r["ratio"] for r in rows)
    ok, failed = record(5, {"suppression below 1:100": worst < 1e-2, "runtime < 60 s": seconds < 60},
                        f"worst competing/target |Z|^2 = {worst:.2e} within +-{hw * 1e3:.0f} nm", seconds)
    assert ok, failed


def test_criterion_6_rate_and_efficiency(ref_setup, ref_spectrum):
    report, seconds = ref_spectrum[2], ref_setup.build_seconds + ref_spectrum[3]
    rate, eff = report["pairs_per_s"], report["efficiency"]
    consistency = rate * report["pump_photon_energy_j"] / report["pump_power_w"]
    ratio = report["rate_ratio"]
    checks = {
        "rate within x5 of 240/s": 240 / 5 <= rate <= 240 * 5,
        "rate*hw/P within 10 % of efficiency": abs(consistency / eff - 1) <= 0.10,
        "efficiency within x5 of 6e-11": 6e-11 / 5 <= eff <= 6e-11 * 5,
        "rate(1 m)/rate(10 cm) >= 10": ratio >= 10,
        "runtime < 300 s": seconds < 300,
    }
    ok, failed = record(6, checks, f"rate {rate:.1f}/s, efficiency {eff:.2e}, 1 m / 10 cm ratio "
                        f"{ratio:.3f}", seconds)
    assert ok, failed


def test_criterion_7_fwhm_and_correlation(ref_setup, ref_spectrum):
    report = ref_spectrum[2]
    t0 = time.perf_counter()
    target = ref_setup.config.design_process()
    idlers = [ModeKey.parse("HE11_R"), ModeKey.parse("HE11_L")]
    lam = np.linspace(*ref_setup.config.scan.band, ref_setup.config.scan.points)
    half = ref_setup.model.with_grating(ref_setup.grating.with_length(0.5))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        peak_h, fwhm_h = peak_fwhm(half, target.signal, idlers, lam)
        joint = half.joint_amplitude([(target.signal, i) for i in idlers], coefficient_grid(peak_h, fwhm_h))
        tau_half = correlation_time(joint) * 1e12
    seconds = ref_setup.build_seconds + ref_spectrum[3] + time.perf_counter() - t0
    fwhm, tau = report["fwhm_nm"], report["correlation_ps"]
    scaling = tau_half / tau
    checks = {
        "FWHM within x2 of 0.96 nm": 0.48 <= fwhm <= 1.92,
        "window within x2 of 7 ps": 3.5 <= tau <= 14,
        "halving L halves the window within 5 %": abs(scaling / 0.5 - 1) <= 0.05,
        "runtime < 300 s": seconds < 300,
    }
    ok, failed = record(7, checks, f"FWHM {fwhm:.3f} nm, window {tau:.2f} ps, L/2 window "
                        f"{tau_half:.2f} ps (ratio {scaling:.3f})", seconds)
    assert ok, failed


def test_criterion_8_solver_correctness(ref_config):
    t0 = time.perf_counter()
    groups = ["bessel", "two_layer", "fd_weak", "fd_ring", "mode_invariants", "grid_refinement"]
    rows = run_checks(ref_config, groups)
    seconds = time.perf_counter() - t0
    checks = {r["check"]: r["passed"] for r in rows}
    checks["runtime < 300 s"] = seconds < 300
    detail = ", ".join(f"{r['check']} {r['computed']:.1e}" for r in rows)
    ok, failed = record(8, checks, detail, seconds)
    assert ok, failed


def test_criterion_9_quadrature_oracle(ref_config):
    t0 = time.perf_counter()
    rows = run_checks(ref_config, ["overlap_oracle"])
    seconds = time.perf_counter() - t0
    (row,) = rows
    ok, failed = record(9, {"full vs shortcut < 1e-8": row["passed"], "runtime < 60 s": seconds < 60},
                        f"20 random triples, worst relative difference {row['computed']:.1e}", seconds)
    assert ok, failed
