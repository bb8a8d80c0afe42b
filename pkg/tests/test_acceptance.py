"""End-to-end acceptance gates for the whole package.

Each criterion is one test that prints a single summary line with the
measured figure next to its bound, then asserts the bound. Two clauses
are known to fail and are left failing on purpose, with the analysis in
the README: the guarded tangent-detuning member of criterion 3 carries
a truncation residue about seven times the stated tolerance at the
stated guard width (the residue scales linearly with the guard), and
the long-sweep limit formula of criterion 6 is genuinely farther than
5e-2 from the finite-window probability at (alpha, beta) = (1.5, 8). Numbers here are honest; nothing is tuned to
pass.
"""

import math
import time

import numpy as np

from isopulse import (
    AEH, LMSZ, AlignParams, AxisSpec, Bounds, EndpointGuard, IntegratorConfig,
    Landscape, QubitState, alignment, analytic, catalog, dynamics, landscape,
    shapes,
)

GRID_CFG = IntegratorConfig(rel_tol=1e-10, abs_tol=1e-12)
SCAN_CFG = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-10)

_DEFECTS = []          # (unitarity, norm drift) from criteria 1-4
_SYMMETRY_MAPS = []    # landscapes re-checked by criterion 11


def _probability(model, picture="detuning", cfg=GRID_CFG):
    run = (dynamics.propagate_detuning if picture == "detuning"
           else dynamics.propagate_phase)
    prop = run(model, cfg=cfg)
    state = prop.apply(QubitState.ground())
    _DEFECTS.append((prop.unitarity_defect, abs(state.norm - 1.0)))
    return min(max(state.p2, 0.0), 1.0)


def _grid(klass, row, alphas, betas, truncation=None):
    values = np.empty((len(betas), len(alphas)))
    for i, beta in enumerate(betas):
        for j, alpha in enumerate(alphas):
            model = catalog.model_from_alpha_beta(klass, row, alpha, beta,
                                                  truncation=truncation)
            values[i, j] = _probability(model)
    return values


def _keep(label, values, alphas, betas, klass, row):
    land = Landscape(values, AxisSpec(alphas[0], alphas[-1], len(alphas)),
                     AxisSpec(betas[0], betas[-1], len(betas)),
                     klass, row, "detuning")
    _SYMMETRY_MAPS.append((label, land))


def test_criterion_01_sech_sweep_exact_oracle():
    t0 = time.perf_counter()
    alphas = np.linspace(0.05, 3.0, 21)
    betas = np.linspace(-2.0, 2.0, 21)
    values = _grid(AEH, 8, alphas, betas)
    exact = np.array([[analytic.aeh_exact(a, b) for a in alphas]
                      for b in betas])
    err = float(np.max(np.abs(values - exact)))
    elapsed = time.perf_counter() - t0
    _keep("criterion-1 sech sweep", values, alphas, betas, AEH, 8)
    ok = err < 1e-5 and elapsed < 60.0
    print(f"criterion 1 {'PASS' if ok else 'FAIL'}: "
          f"max|dP| = {err:.3e} (bound 1e-5), {elapsed:.1f} s (bound 60 s)")
    assert err < 1e-5
    assert elapsed < 60.0


def test_criterion_02_isoprobability_lmsz():
    alphas = np.linspace(0.1, 2.5, 11)
    betas = np.linspace(-2.0, 2.0, 11)
    rows = (1, 4, 8, 16)
    grids = {}
    for row in rows:
        grids[row] = _grid(LMSZ, row, alphas, betas)
        _keep(f"criterion-2 row {row}", grids[row], alphas, betas, LMSZ, row)
    err = max(float(np.max(np.abs(grids[r1] - grids[r2])))
              for r1 in rows for r2 in rows if r1 < r2)
    ok = err < 1e-4
    print(f"criterion 2 {'PASS' if ok else 'FAIL'}: pairwise max|dP| = "
          f"{err:.3e} over rows {rows} (bound 1e-4)")
    assert err < 1e-4


def test_criterion_03_isoprobability_aeh():
    alphas = np.linspace(0.1, 2.5, 11)
    betas = np.linspace(-2.0, 2.0, 11)
    rows = (4, 8, 12)
    grids = {}
    for row in rows:
        grids[row] = _grid(AEH, row, alphas, betas)
        _keep(f"criterion-3 row {row}", grids[row], alphas, betas, AEH, row)
    guarded = _grid(AEH, 1, alphas, betas, truncation=EndpointGuard())
    _keep("criterion-3 row 1 guarded", guarded, alphas, betas, AEH, 1)
    err = max(float(np.max(np.abs(grids[r1] - grids[r2])))
              for r1 in rows for r2 in rows if r1 < r2)
    err_guard = float(np.max(np.abs(guarded - grids[8])))
    failures = []
    if err >= 1e-4:
        failures.append(f"pairwise {err:.3e} >= 1e-4")
    if err_guard >= 1e-3:
        failures.append(f"guarded row 1 vs row 8 {err_guard:.3e} >= 1e-3")
    print(f"criterion 3 {'PASS' if not failures else 'FAIL'}: pairwise "
          f"max|dP| = {err:.3e} (bound 1e-4); guarded tan-detuning vs row 8 "
          f"= {err_guard:.3e} (bound 1e-3)")
    assert not failures, "; ".join(failures)


def test_criterion_04_picture_equivalence():
    rng = np.random.default_rng(20260815)
    rows = list(shapes.ROW_INDICES)
    worst = 0.0
    for _ in range(50):
        klass = AEH if rng.integers(2) else LMSZ
        row = rows[rng.integers(len(rows))]
        alpha = float(rng.uniform(0.1, 2.5))
        beta = float(rng.uniform(-1.5, 1.5))
        model = catalog.model_from_alpha_beta(klass, row, alpha, beta)
        p_det = _probability(model, "detuning")
        p_ph = _probability(model, "phase")
        worst = max(worst, abs(p_det - p_ph))
    ok = worst < 1e-8
    print(f"criterion 4 {'PASS' if ok else 'FAIL'}: max picture gap = "
          f"{worst:.3e} over 50 samples (bound 1e-8)")
    assert worst < 1e-8


def test_criterion_05_unitarity():
    assert _DEFECTS, "criteria 1-4 must run first"
    unit = max(d[0] for d in _DEFECTS)
    drift = max(d[1] for d in _DEFECTS)
    ok = unit < 1e-9 and drift < 1e-9
    print(f"criterion 5 {'PASS' if ok else 'FAIL'}: unitarity defect = "
          f"{unit:.3e}, norm drift = {drift:.3e} over {len(_DEFECTS)} runs "
          f"(bounds 1e-9)")
    assert unit < 1e-9
    assert drift < 1e-9


def test_criterion_06_lmsz_long_sweep_limit():
    errs = {}
    for alpha, beta in ((1.0, 8.0), (1.5, 8.0), (2.0, 10.0), (1.0, 16.0)):
        model = catalog.model_from_alpha_beta(LMSZ, 1, alpha, beta)
        p = dynamics.transition_probability(model, cfg=GRID_CFG)
        errs[(alpha, beta)] = abs(p - analytic.lmsz_asymptotic(alpha, beta))
    failures = []
    for point in ((1.0, 8.0), (1.5, 8.0), (2.0, 10.0)):
        if errs[point] >= 5e-2:
            failures.append(f"|dP| at {point} = {errs[point]:.3e} >= 5e-2")
    if errs[(1.0, 16.0)] >= errs[(1.0, 8.0)]:
        failures.append("error did not shrink from beta 8 to beta 16")
    detail = ", ".join(f"{pt}: {e:.3e}" for pt, e in errs.items())
    print(f"criterion 6 {'PASS' if not failures else 'FAIL'}: |dP| vs "
          f"long-sweep limit {detail} (bound 5e-2, last decreasing)")
    assert not failures, "; ".join(failures)


def test_criterion_07_resonant_zeros():
    worst = max(
        dynamics.transition_probability(
            catalog.model_from_alpha_beta(AEH, 8, alpha, 0.0), cfg=GRID_CFG)
        for alpha in (1.0, 2.0))
    ok = worst < 1e-6
    print(f"criterion 7 {'PASS' if ok else 'FAIL'}: max P at integer "
          f"resonant areas = {worst:.3e} (bound 1e-6)")
    assert worst < 1e-6


def test_criterion_08_catalog_audit():
    report = shapes.audit_report()
    worst_area = 0.0
    worst_res = 0.0
    for row in shapes.ROW_INDICES:
        shp = shapes.shape(row)
        worst_area = max(worst_area, abs(shp.area - math.pi))
        x_max = shapes.tail_cut(row) if shp.infinite else shp.domain_half
        worst_res = max(worst_res,
                        shapes.derivative_residual(shp.f, shp.s, x_max))
    fallback = {row for row, closed in report.items() if not closed}
    ok = worst_area < 1e-6 and worst_res < 1e-6 and fallback == {11, 14, 15}
    print(f"criterion 8 {'PASS' if ok else 'FAIL'}: max area error = "
          f"{worst_area:.3e}, max ds/dx residual = {worst_res:.3e} "
          f"(bounds 1e-6); quadrature fallback rows = {sorted(fallback)}")
    assert worst_area < 1e-6
    assert worst_res < 1e-6
    assert fallback == {11, 14, 15}


def test_criterion_09_detuning_first_round_trip():
    sech_model = catalog.pair_from_detuning(AEH, math.tanh, x_max=8.0)
    xs = np.linspace(-7.5, 7.5, 41)
    err_sech = max(abs(sech_model.omega(x) - 1.0 / math.cosh(x)) for x in xs)

    linear_model = catalog.pair_from_detuning(AEH, lambda x: x, x_max=5.0)
    xs = np.linspace(-4.9, 4.9, 41)
    err_lin = max(
        abs(linear_model.omega(x)
            - (1.0 if x == 0.0 else abs(x) / math.sqrt(math.expm1(x * x))))
        for x in xs)
    ok = err_sech < 1e-6 and err_lin < 1e-6
    print(f"criterion 9 {'PASS' if ok else 'FAIL'}: pairing ODE envelope "
          f"error = {err_sech:.3e} (sech), {err_lin:.3e} (linear chirp) "
          f"(bounds 1e-6)")
    assert err_sech < 1e-6
    assert err_lin < 1e-6


def test_criterion_10_landscape_alignment():
    land = landscape.scan(AEH, 8, AxisSpec(0.0, 3.0, 101),
                          AxisSpec(-2.0, 2.0, 101), cfg=SCAN_CFG)
    _SYMMETRY_MAPS.append(("criterion-10 scan", land))

    rng = np.random.default_rng(1138)
    shifted = (alignment.shift_map(land.values, 7, -4)
               + 0.02 * rng.standard_normal(land.values.shape))
    res = alignment.align(land.values, shifted, Bounds(12, 12, 12, 12))
    ratio = res.mse_post / res.mse_pre

    ident = alignment.align(land.values, land.values)

    big = alignment.resample_bilinear(land, 1000, 1000)
    shifted_big = (alignment.shift_map(big.values, 7, -4)
                   + 0.02 * rng.standard_normal(big.values.shape))
    t0 = time.perf_counter()
    res_big = alignment.align(big.values, shifted_big)
    elapsed = time.perf_counter() - t0

    failures = []
    if abs(res.params.dx - 7) > 1 or abs(res.params.dy + 4) > 1:
        failures.append(f"registered ({res.params.dx}, {res.params.dy}), "
                        f"expected (7, -4) within 1 px")
    if ratio > 0.25:
        failures.append(f"mse ratio {ratio:.3f} > 0.25")
    if ident.params != AlignParams() or ident.mse_post != 0.0:
        failures.append("self-alignment is not exactly zero")
    if elapsed >= 30.0:
        failures.append(f"1000x1000 alignment took {elapsed:.1f} s")
    print(f"criterion 10 {'PASS' if not failures else 'FAIL'}: registered "
          f"({res.params.dx}, {res.params.dy}) for true (7, -4), mse ratio "
          f"= {ratio:.4f} (bound 0.25), self-align zero = "
          f"{ident.params == AlignParams()}, 1000x1000 at "
          f"({res_big.params.dx}, {res_big.params.dy}) in {elapsed:.1f} s "
          f"(bound 30 s)")
    assert not failures, "; ".join(failures)


def test_criterion_11_chirp_symmetry():
    assert _SYMMETRY_MAPS, "earlier criteria must run first"
    worst = 0.0
    worst_label = ""
    for label, land in _SYMMETRY_MAPS:
        gap = float(np.max(np.abs(land.values - land.values[::-1])))
        if gap > worst:
            worst, worst_label = gap, label
    ok = worst < 1e-6
    print(f"criterion 11 {'PASS' if ok else 'FAIL'}: max |P(a,b) - P(a,-b)| "
          f"= {worst:.3e} ({worst_label or 'all maps'}; "
          f"{len(_SYMMETRY_MAPS)} maps, bound 1e-6)")
    assert worst < 1e-6
