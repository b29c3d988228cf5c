"""Acceptance suite: one test per criterion.

Each test gathers every sub-check before asserting, so a failing criterion
reports all of its measured numbers. The terminal summary prints one
PASS/FAIL line per criterion (see conftest.py).
"""
import csv
import math
import time

import numpy as np
import pytest

from citymodes import cli, coupling, dtn, screen_bie, specfun

import oracle

# pinned tolerances
SPECIAL_REL_TOL = 1e-10
SPECIAL_TIME_LIMIT = 5.0
STRUVE_ABS_TOL = 1e-8
STRUVE_TAIL_TOL = 0.1
DTN_LIMIT_TOL = 1e-2
LOW_K_MODEL_TOL = 0.05
LOW_K_RATIO_RANGE = (0.5, 1.5)
LOW_K_TIME_LIMIT = 5.0
HIGH_K_IM_TOL = 0.25
HIGH_K_SLOPE_MAX = 0.85
HIGH_K_TIME_LIMIT = 60.0
CROSS_METHOD_TOL = 1e-4
BOUNDARY_TOL = 1e-2
MIRROR_TOL = 1e-12
FAR_FIELD_SPREAD = 0.10
LOW_TABLE_TOL = 0.05
GAP_TABLE_TOL = 0.15

DEFAULT = coupling.DEFAULT_CONSTANTS


def check(failures, ok, message):
    print(("ok   " if ok else "FAIL ") + message)
    if not ok:
        failures.append(message)


def flux(k, M=None):
    return screen_bie.flux(screen_bie.solve_density(k, M or screen_bie.default_truncation(k))).flux


@pytest.mark.criterion(1, "special functions match the extended-precision oracle")
def test_criterion_1_special_functions():
    failures = []
    orders, args = (0, 1, 2, 5, 10, 50), (0.1, 1.0, 10.0, 50.0)
    refs = {(n, z): oracle.hankel1(n, z) for n in orders for z in args}
    start = time.perf_counter()
    got = {(n, z): (specfun.bessel_j(n, z), specfun.bessel_y(n, z), specfun.hankel1(n, z))
           for n in orders for z in args}
    elapsed = time.perf_counter() - start
    worst = 0.0
    for key, (j, y, h) in got.items():
        ref = refs[key]
        worst = max(worst, abs(j - ref.real) / abs(ref.real), abs(y - ref.imag) / abs(ref.imag),
                    abs(h - ref) / abs(ref))
    check(failures, worst <= SPECIAL_REL_TOL, f"worst relative error {worst:.2e} <= {SPECIAL_REL_TOL:g}")
    check(failures, elapsed < SPECIAL_TIME_LIMIT, f"runtime {elapsed:.3f} s < {SPECIAL_TIME_LIMIT} s")
    assert not failures, failures


@pytest.mark.criterion(2, "closed-form integral of H0 against quadrature")
def test_criterion_2_h0_integral():
    failures = []
    for t in (1.0, 5.0, 10.0):
        err = abs(specfun.h0_partial_integral(t) - oracle.h0_integral(t))
        check(failures, err <= STRUVE_ABS_TOL, f"t={t:g}: |closed form - quadrature| = {err:.2e}")
    tail = abs(specfun.h0_partial_integral(200.0) - 1)
    check(failures, tail <= STRUVE_TAIL_TOL, f"t=200: |integral - 1| = {tail:.4f}")
    assert not failures, failures


@pytest.mark.criterion(3, "DtN symbols: sign and small-k limit")
def test_criterion_3_dtn():
    failures = []
    ks = np.logspace(-3, 2, 60)
    count, worst = 0, -math.inf
    for k in ks:
        symbols = dtn.dtn_symbols(60, float(k))
        for n in range(-60, 61):
            worst = max(worst, symbols[abs(n)].real)
            count += 1
    check(failures, count >= 7000, f"grid size {count}")
    check(failures, worst <= 0, f"max Re lambda_n(k) = {worst:.3e} <= 0")
    sups = []
    for k in (1e-1, 1e-2, 1e-3, 1e-4):
        s = dtn.dtn_symbols(60, k)
        sups.append(max(abs(s[n] / -n - 1) for n in range(1, 61)))
    check(failures, all(a > b for a, b in zip(sups, sups[1:])),
          "sup |lambda_n/(-|n|) - 1| strictly decreasing: " + ", ".join(f"{v:.2e}" for v in sups))
    check(failures, sups[-1] <= DTN_LIMIT_TOL, f"sup at k=1e-4 is {sups[-1]:.2e} <= {DTN_LIMIT_TOL:g}")
    assert not failures, failures


@pytest.mark.criterion(4, "low-frequency flux law")
def test_criterion_4_low_frequency():
    failures = []
    start = time.perf_counter()
    I = flux(1e-3, 32)
    model = coupling.low_freq_model(1e-3)
    dev = abs(I / model - 1)
    ratios = [flux(k, 32).real / (-math.pi / math.log(k)) for k in (1e-2, 1e-3, 1e-4)]
    elapsed = time.perf_counter() - start
    check(failures, dev <= LOW_K_MODEL_TOL,
          f"|I/(pi k H1/H0) - 1| at k=1e-3 is {dev:.4f} <= {LOW_K_MODEL_TOL}")
    check(failures, all(LOW_K_RATIO_RANGE[0] <= r <= LOW_K_RATIO_RANGE[1] for r in ratios)
          and abs(ratios[0] - 1) > abs(ratios[1] - 1) > abs(ratios[2] - 1),
          "Re I/(-pi/ln k) -> 1 monotonically: " + ", ".join(f"{r:.4f}" for r in ratios))
    check(failures, elapsed < LOW_K_TIME_LIMIT, f"runtime {elapsed:.3f} s < {LOW_K_TIME_LIMIT} s")
    assert not failures, failures


@pytest.mark.criterion(5, "high-frequency flux law")
def test_criterion_5_high_frequency():
    failures = []
    start = time.perf_counter()
    I100 = flux(100.0, 512)
    dev = abs(I100.imag / 100 + 1)
    check(failures, dev <= HIGH_K_IM_TOL, f"|Im I(100)/100 + 1| = {dev:.2e} <= {HIGH_K_IM_TOL}")
    ks = np.array([25.0, 50.0, 100.0, 200.0])
    gaps = [abs(flux(k) + 1j * k) for k in ks]
    slope = np.polyfit(np.log(ks), np.log(gaps), 1)[0]
    check(failures, slope <= HIGH_K_SLOPE_MAX, f"slope of ln|I + ik| vs ln k = {slope:.3f} <= {HIGH_K_SLOPE_MAX}")
    grid = np.logspace(-3, math.log10(200.0), 60)
    worst = max(flux(k).imag for k in grid)
    check(failures, worst < 0, f"max Im I on 60-point grid [1e-3, 200] = {worst:.3e} < 0")
    elapsed = time.perf_counter() - start
    check(failures, elapsed < HIGH_K_TIME_LIMIT, f"runtime {elapsed:.1f} s < {HIGH_K_TIME_LIMIT} s")
    assert not failures, failures


@pytest.mark.criterion(6, "spectral and graded-mesh fluxes agree")
def test_criterion_6_cross_method():
    failures = []
    for k, N in ((0.5, 2048), (2.0, 2048), (10.0, 4096)):
        spectral = flux(k, 64)
        other = screen_bie.solve_density_oracle(k, N).flux
        err = abs(other - spectral) / abs(spectral)
        check(failures, err <= CROSS_METHOD_TOL, f"k={k:g}, N={N}: relative difference {err:.2e}")
    assert not failures, failures


@pytest.mark.criterion(7, "mode existence for the default constants")
def test_criterion_7_modes():
    failures = []
    samples = coupling.scan(DEFAULT, 1e-3, 5.0, 200)
    changes = coupling.sign_changes(samples)
    check(failures, changes >= 1, f"{changes} sign change(s) on 200 log points")
    modes = coupling.find_modes(samples, DEFAULT)
    for m in modes:
        lo, hi = m.bracket
        product = coupling.coupling_gap(lo).gap * coupling.coupling_gap(hi).gap
        check(failures, product <= 0 and lo <= m.k_root <= hi, f"mode k={m.k_root:.12f} bracketed")
        check(failures, coupling.residual_ok(m, DEFAULT), f"mode k={m.k_root:.12f} residual {m.residual:.1e}")
    fine = coupling.find_modes(coupling.scan(DEFAULT, 1e-3, 5.0, 400), DEFAULT)
    check(failures, len(modes) >= 1 and len(fine) == len(modes),
          f"mode count {len(modes)} at 200 points, {len(fine)} at 400 points")
    assert not failures, failures


@pytest.mark.criterion(8, "sign regimes of the constants")
def test_criterion_8_regimes():
    failures = []
    none = coupling.CityConstants(c3=-1e3)
    n0 = len(coupling.find_modes(coupling.scan(none, 1e-3, 50.0, 200), none))
    check(failures, n0 == 0, f"c3=-1000: {n0} modes")
    some = coupling.CityConstants(c3=-5 / 12, c4=1e3)
    n1 = len(coupling.find_modes(coupling.scan(some, 1e-3, 50.0, 200), some))
    check(failures, n1 >= 1, f"c3=-5/12, c4=1000: {n1} modes")
    assert not failures, failures


@pytest.mark.criterion(9, "field representation: boundary value, symmetry, decay")
def test_criterion_9_field():
    failures = []
    d1 = screen_bie.solve_density(1.0, 64)
    x1 = np.linspace(-1.0, 1.0, 21)
    x1 = x1[np.abs(x1) < 0.5]
    u = screen_bie.evaluate_field_many(d1, np.c_[x1, np.full_like(x1, 1e-3)])
    dev = np.abs(u - 1).max()
    check(failures, dev <= BOUNDARY_TOL, f"max |u - 1| at x2=1e-3 over grid row |x1|<1/2: {dev:.2e}")
    pts = np.array([[0.3, 0.2], [-0.7, 0.05], [0.0, 1.5], [1.2, 0.4]])
    up = screen_bie.evaluate_field_many(d1, pts)
    down = screen_bie.evaluate_field_many(d1, pts * [1, -1])
    mirror = np.abs(up - down).max()
    check(failures, mirror <= MIRROR_TOL, f"mirror symmetry error {mirror:.1e}")
    d2 = screen_bie.solve_density(2.0, 32)
    scaled = [abs(screen_bie.evaluate_field(d2, (0.0, r)).value) * math.sqrt(r) for r in (20, 40, 80)]
    spread = max(scaled) / min(scaled) - 1
    check(failures, spread <= FAR_FIELD_SPREAD, f"|u| sqrt(r) spread over r=20,40,80: {spread:.2e}")
    assert not failures, failures


def _table(tmp_path, name, *args):
    path = tmp_path / name
    assert cli.run(["asympt", *args, "--out", str(path)]) == cli.EXIT_OK
    return path.read_bytes()


@pytest.mark.criterion(10, "asymptotic tables are deterministic and within tolerance")
def test_criterion_10_tables(tmp_path):
    failures = []
    specs = {"low": ("low",), "high": ("high",), "gap": ("gap", "--branch", "high")}
    tables = {}
    for name, args in specs.items():
        first = _table(tmp_path, f"{name}1.csv", *args)
        second = _table(tmp_path, f"{name}2.csv", *args)
        check(failures, first == second, f"{name} table byte-identical on rerun")
        rows = list(csv.reader(first.decode().splitlines()))
        tables[name] = [[float(v) for v in r] for r in rows[1:]]
    low = min(tables["low"], key=lambda r: r[0])
    diff = abs(low[1] - low[2])
    check(failures, diff <= LOW_TABLE_TOL, f"low table at log10 k={low[0]:g}: column difference {diff:.4f}")
    high = max(tables["high"], key=lambda r: r[0])
    dev = abs(high[1] + 1)
    check(failures, dev <= HIGH_K_IM_TOL, f"high table at k={high[0]:g}: |im_flux_over_k + 1| = {dev:.2e}")
    gap = max(tables["gap"], key=lambda r: r[0])
    diff = abs(gap[1] - gap[2])
    check(failures, abs(10 ** gap[0] - 40) < 1e-9 and diff <= GAP_TABLE_TOL,
          f"gap table at k={10 ** gap[0]:g}: column difference {diff:.4f}")
    assert not failures, failures
