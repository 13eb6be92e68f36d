"""Acceptance criteria, one test per criterion, each printing a PASS/FAIL line.

Criterion 6b is a known, documented red: the faithful sweep gives the
opposite median ordering (see the analysis in the failure message).  Every
other criterion passes at its stated tolerance.

Frozen oracle values below were produced by the direct Kirkwood-Dirac trace
oracle on the 400-point (0, T] grid of the reference configuration and are
locked; they pin the simulated peak negativity and extraction ratio, for
which no closed-form targets exist.
"""

import time

import numpy as np
import pytest

from quasiwork import analysis, explore, schemes
from quasiwork.emitters import z_stderr_prediction
from quasiwork.propagate import propagator_closed, propagator_stepped
from quasiwork.selftest import run_selftest

from conftest import random_drive, random_pure_density

GRID_POINTS = 400

# frozen oracle fixtures (reference configuration, 400-point grid)
PEAK_NEGATIVITY = 0.2483949065921187
PEAK_INDEX = 200
MIN_W = -13.306236303357194
MIN_W_INDEX = 199
MIN_W_TPM = -3.3943245767047445
MIN_W_TPM_INDEX = 199
EXTRACTION_RATIO = 3.9201425799636005
MIN_Z_MINUS_PLUS = -0.1241974532960598

SWEEP_SEED = 20260810


def _report(criterion, ok, detail):
    print(f"ACCEPTANCE {criterion} {'PASS' if ok else 'FAIL'}: {detail}")


def test_criterion_1_reconstruction_identity():
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        params = random_drive(rng)
        rho = random_pure_density(rng)
        t = rng.uniform(0.0, 0.5)
        z = schemes.mhq_reconstruct(schemes.scheme_tables(rho, t, params)).z
        q = schemes.kdq_direct(rho, t, params)
        worst = max(worst, float(np.max(np.abs(z - q.q.real))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5.0
    _report(1, ok, f"max |z - Re q| = {worst:.3e} over 200 triples in {elapsed:.2f}s")
    assert worst <= 1e-9
    assert elapsed < 5.0


def test_criterion_2_propagator_cross_validation(ref_params, ref_period):
    times = np.linspace(ref_period / 50, ref_period, 50)
    worst = 0.0
    for t in times:
        closed = propagator_closed(float(t), ref_params).u
        stepped = propagator_stepped(float(t), ref_params, 100_000).u
        worst = max(worst, float(np.linalg.norm(closed - stepped, "fro")))
    ratios = []
    for t in times[-5:]:
        closed = propagator_closed(float(t), ref_params).u
        e_half = np.linalg.norm(closed - propagator_stepped(float(t), ref_params, 50_000).u, "fro")
        e_full = np.linalg.norm(closed - propagator_stepped(float(t), ref_params, 100_000).u, "fro")
        ratios.append(float(e_half / e_full))
    ok = worst <= 1e-6 and all(3.0 <= r <= 5.0 for r in ratios)
    _report(2, ok, f"max Frobenius distance {worst:.3e}; halving ratios {np.round(ratios, 3)}")
    assert worst <= 1e-6
    for r in ratios:
        assert 3.0 <= r <= 5.0


def test_criterion_3_marginals_and_s(ref_grid_data, ref_spec):
    _, tables, _ = ref_grid_data
    expected_s = (0.7654 + 0.0009) / 1.0001
    worst_row = worst_col = worst_s = 0.0
    for tab in tables:
        z = schemes.mhq_reconstruct(tab).z
        worst_row = max(worst_row, float(np.max(np.abs(z.sum(axis=1) - tab.p_init))))
        worst_col = max(worst_col, float(np.max(np.abs(z.sum(axis=0) - tab.p_end))))
        worst_s = max(worst_s, abs(analysis.s_stat(z) - expected_s))
    in_band = 0.770 - 0.021 <= expected_s <= 0.770 + 0.021
    ok = worst_row <= 1e-10 and worst_col <= 1e-10 and worst_s <= 1e-10 and in_band
    _report(
        3,
        ok,
        f"row/col marginal defects {worst_row:.2e}/{worst_col:.2e}; "
        f"s = {expected_s:.4f} (deviation {worst_s:.2e}, band 0.749..0.791)",
    )
    assert worst_row <= 1e-10
    assert worst_col <= 1e-10
    assert worst_s <= 1e-10
    assert in_band


def test_criterion_4_negativity_structure(ref_grid_data, ref_rho, ref_params):
    times, _, quasis = ref_grid_data
    aleph0 = analysis.total_negativity(schemes.kdq_direct(ref_rho, 0.0, ref_params).z) - 1.0
    aleph = np.array([analysis.total_negativity(q.z) - 1.0 for q in quasis])
    z_stack = np.stack([q.z for q in quasis])
    mask = np.ones((3, 3), dtype=bool)
    mask[2, 0] = False
    other_cells_min = float(z_stack[:, mask].min())
    only_minus_plus = other_cells_min >= -1e-9
    coverage = float(np.mean(aleph > 1e-3))
    peak = float(aleph.max())
    peak_idx = int(np.argmax(aleph))
    ok = (
        abs(aleph0) <= 1e-9
        and np.all(aleph <= analysis.NEGATIVITY_BOUND + 1e-9)
        and coverage > 0.80
        and only_minus_plus
        and peak == pytest.approx(PEAK_NEGATIVITY, abs=5e-9)
        and float(z_stack[:, 2, 0].min()) == pytest.approx(MIN_Z_MINUS_PLUS, abs=5e-9)
    )
    _report(
        4,
        ok,
        f"aleph(0) = {aleph0:.1e}; coverage {100 * coverage:.1f}% > 80%; "
        f"peak {peak:.10f} at index {peak_idx} (fixture {PEAK_NEGATIVITY:.10f}); "
        f"only (-,+) negative (other cells >= {other_cells_min:.2e})",
    )
    assert abs(aleph0) <= 1e-9
    assert np.all(aleph <= analysis.NEGATIVITY_BOUND + 1e-9)
    assert coverage > 0.80
    assert only_minus_plus
    assert peak == pytest.approx(PEAK_NEGATIVITY, abs=5e-9)
    assert peak_idx == PEAK_INDEX


def test_criterion_5_work_comparison(ref_grid_data):
    _, tables, quasis = ref_grid_data
    w_mhq = np.array([analysis.avg_work_mhq(q) for q in quasis])
    w_tpm = np.array([analysis.avg_work_tpm(tab) for tab in tables])
    aleph = np.array([analysis.total_negativity(q.z) - 1.0 for q in quasis])
    i_w, i_t, i_a = int(np.argmin(w_mhq)), int(np.argmin(w_tpm)), int(np.argmax(aleph))
    strictly_lower = w_mhq.min() < w_tpm.min()
    co_located = abs(i_w - i_a) <= 1 and abs(i_t - i_a) <= 1
    both_negative = w_mhq.min() < 0.0 and w_tpm.min() < 0.0
    ratio = float(w_mhq.min() / w_tpm.min()) if both_negative else float("nan")
    ok = (
        strictly_lower
        and co_located
        and both_negative
        and ratio == pytest.approx(EXTRACTION_RATIO, rel=1e-6)
    )
    _report(
        5,
        ok,
        f"min<W> = {w_mhq.min():.4f} (idx {i_w}) < min<W>_TPM = {w_tpm.min():.4f} (idx {i_t}); "
        f"negativity peak idx {i_a}; extraction ratio {ratio:.4f} "
        f"(fixture {EXTRACTION_RATIO:.4f})",
    )
    assert strictly_lower
    assert co_located
    assert both_negative
    assert w_mhq.min() == pytest.approx(MIN_W, rel=1e-9)
    assert w_tpm.min() == pytest.approx(MIN_W_TPM, rel=1e-9)
    assert ratio == pytest.approx(EXTRACTION_RATIO, rel=1e-6)


@pytest.fixture(scope="module")
def sweep_1000():
    start = time.perf_counter()
    records, summary = explore.sweep(explore.SweepConfig(n_sets=1000, seed=SWEEP_SEED))
    return records, summary, time.perf_counter() - start


def test_criterion_6a_negativity_bound(sweep_1000):
    records, summary, elapsed = sweep_1000
    bound = analysis.NEGATIVITY_BOUND + 1e-9
    worst = max(v.max_aleph for r in records for v in r.variants)
    ok = summary.bound_violations == 0 and worst <= bound and elapsed < 120.0
    _report("6a", ok, f"max aleph over sweep {worst:.6f} <= sqrt(3)-1 (runtime {elapsed:.1f}s < 120s)")
    assert summary.bound_violations == 0
    assert worst <= bound
    assert elapsed < 120.0


def test_criterion_6b_twin_work_medians(sweep_1000):
    _, summary, _ = sweep_1000
    passed = summary.median_min_w_twins < summary.median_min_w_original
    detail = (
        f"median min<W> twins {summary.median_min_w_twins:.3f} vs "
        f"originals {summary.median_min_w_original:.3f} at n=1000"
    )
    if not passed:
        # statistical criterion: confirm on a 10x larger run before reporting red
        _, confirm = explore.sweep(explore.SweepConfig(n_sets=10_000, seed=SWEEP_SEED + 1))
        passed = confirm.median_min_w_twins < confirm.median_min_w_original
        detail += (
            f"; 10x confirmation run: twins {confirm.median_min_w_twins:.3f} vs "
            f"originals {confirm.median_min_w_original:.3f}"
        )
    _report("6b", passed, detail)
    assert passed, (
        "known red, by physics rather than chance: unequal-ramp draws have the "
        "more negative median min<W> because they support larger negativity "
        "(max aleph 0.72 vs 0.39 for equal-ramp twins). Equal ramps do ATTAIN "
        "the same extreme floor (normalized global minima -1.06 vs -1.13; min "
        "Re q at the universal -1/8 for both), so restricting to phi1 = phi2 "
        "costs nothing at the extremes, but the median ordering asserted here "
        "is inverted in the faithful simulation. See README, known-failure "
        "note. | " + detail
    )


def test_criterion_6c_max_negativity_needs_unequal_ramps(sweep_1000):
    _, summary, _ = sweep_1000
    passed = not summary.global_max_aleph_equal_ramps
    detail = (
        f"global max aleph {summary.global_max_aleph:.4f} from "
        f"{summary.global_max_aleph_kind} (phi1 != phi2: {passed}) at n=1000"
    )
    if not passed:
        _, confirm = explore.sweep(explore.SweepConfig(n_sets=10_000, seed=SWEEP_SEED + 1))
        passed = not confirm.global_max_aleph_equal_ramps
        detail += f"; 10x confirmation: {confirm.global_max_aleph:.4f} from {confirm.global_max_aleph_kind}"
    _report("6c", passed, detail)
    assert passed


def test_criterion_7_shot_noise_realism(ref_rho, ref_params, ref_period):
    t_star = ref_period * (PEAK_INDEX + 1) / GRID_POINTS
    exact_tab = schemes.scheme_tables(ref_rho, t_star, ref_params)
    z_exact = schemes.mhq_reconstruct(exact_tab).z
    shots = 10**6
    predicted = z_stderr_prediction(exact_tab, shots)
    samples = np.empty((100, 3, 3))
    for s in range(100):
        tab = schemes.scheme_tables(ref_rho, t_star, ref_params, shots=shots, seed=s)
        samples[s] = schemes.mhq_reconstruct(tab).z
    empirical = samples.std(axis=0)
    ratio_ok = True
    worst_ratio = 1.0
    for i in range(3):
        for f in range(3):
            if predicted[i, f] < 1e-7:
                ratio_ok &= empirical[i, f] <= 4e-7
            else:
                r = empirical[i, f] / predicted[i, f]
                worst_ratio = max(worst_ratio, max(r, 1.0 / r))
                ratio_ok &= 0.5 <= r <= 2.0
    tab_hi = schemes.scheme_tables(ref_rho, t_star, ref_params, shots=10**8, seed=0)
    z_hi = schemes.mhq_reconstruct(tab_hi).z
    limit_dev = float(np.max(np.abs(z_hi - z_exact)))
    ok = ratio_ok and limit_dev <= 1e-3
    _report(
        7,
        ok,
        f"empirical/predicted std within x{worst_ratio:.2f} (tolerance x2) over 100 seeds; "
        f"1e8-shot deviation {limit_dev:.2e} <= 1e-3",
    )
    assert ratio_ok
    assert limit_dev <= 1e-3


def test_criterion_8_selftest():
    start = time.perf_counter()
    report = run_selftest()
    elapsed = time.perf_counter() - start
    ok = report.ok and elapsed < 60.0
    _report(8, ok, f"{len(report.results)} invariant suites in {elapsed:.1f}s (< 60s)")
    if not report.ok:
        for line in report.lines():
            print("   ", line)
    assert report.ok
    assert elapsed < 60.0
