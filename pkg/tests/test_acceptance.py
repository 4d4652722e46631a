"""Acceptance suite: nine end-to-end criteria, one PASS/FAIL line each.

The lines are collected in ``LINES`` and printed in the pytest terminal
summary (see conftest.py), so they show up whether or not ``-s`` is used.
"""

import itertools
import time
from contextlib import contextmanager

import numpy as np

from chiplet_lce.cli import main
from chiplet_lce.config import ChipletDesign, SimSettings, load_config
from chiplet_lce.explorer import SweepAxis, dominates, load_space, pareto_min_lce, sweep
from chiplet_lce.faultsim import ComponentYields, mc_chiplet
from chiplet_lce.metrics import active_core_transistors, evaluate
from chiplet_lce.reliability import (chiplet_reliability, degraded_throughput_factor, exp_reliability,
                                     k_of_n_reliability, mttf, mttf_degraded, series)
from chiplet_lce.rng import derive_seed

from conftest import binomial_sigma, enumerate_chiplet_yield, random_small_design

LINES = {}
SIM = SimSettings()


@contextmanager
def criterion(n, title):
    info = {}
    start = time.perf_counter()
    try:
        yield info
    except BaseException as err:
        LINES[n] = f"FAIL  {n}. {title} ({type(err).__name__}: {err})"
        print(LINES[n])
        raise
    detail = info.get("detail", "")
    LINES[n] = f"PASS  {n}. {title} [{time.perf_counter() - start:.1f} s] {detail}".rstrip()
    print(LINES[n])


def test_1_closed_form_mttf():
    with criterion(1, "closed-form MTTF oracles, rel err <= 1e-5, < 5 s") as info:
        start = time.perf_counter()
        cases = []
        for lam in (0.001, 0.05, 0.3, 1.0, 7.5):
            cases.append(("1/lam", mttf(exp_reliability(lam), SIM), 1.0 / lam))
        for n, lam in ((2, 0.01), (12, 0.0025), (48, 0.002), (100, 0.03), (7, 1.5)):
            curve = series([exp_reliability(lam)] * n) if n <= 12 else k_of_n_reliability(n, 0, lam)
            cases.append(("1/(N lam)", mttf(curve, SIM), 1.0 / (n * lam)))
        for n, a, lam in ((1, 1, 0.01), (12, 6, 0.0025), (30, 4, 0.02), (55, 8, 0.004), (100, 20, 0.001)):
            exact = sum(1.0 / i for i in range(n, n + a + 1)) / lam
            cases.append(("harmonic", mttf(k_of_n_reliability(n, a, lam), SIM), exact))
        for n, lam in ((1, 0.01), (4, 0.2), (12, 0.0025), (20, 0.05), (64, 0.001)):
            cases.append(("1/((N+1) lam)", mttf_degraded(n, 0, lam, SIM), 1.0 / ((n + 1) * lam)))
        elapsed = time.perf_counter() - start
        worst = max(abs(got - want) / want for _, got, want in cases)
        assert len(cases) == 20
        assert worst <= 1e-5, f"worst relative error {worst:.3g}"
        assert elapsed < 5.0, f"took {elapsed:.2f} s"
        info["detail"] = f"max rel err {worst:.2e}"


def test_2_mc_matches_enumeration():
    with criterion(2, "MC yield within 3 sigma of enumeration in >= 24/25 designs, < 60 s") as info:
        start = time.perf_counter()
        rng = np.random.default_rng(2024)
        n, inside = 100_000, 0
        for i in range(25):
            design, y = random_small_design(rng)
            exact = enumerate_chiplet_yield(design, y)
            p, _ = mc_chiplet(design, None, SimSettings(mc_iterations=n, rng_seed=1000 + i), yields=y)
            inside += abs(p - exact) <= 3 * binomial_sigma(exact, n)
        elapsed = time.perf_counter() - start
        assert inside >= 24, f"only {inside}/25 inside"
        assert elapsed < 60.0, f"took {elapsed:.1f} s"
        info["detail"] = f"{inside}/25 inside"


def test_3_series_2x2():
    with criterion(3, "2x2 series chiplet MC yield within 3 sigma of 0.9^8") as info:
        n, exact = 100_000, 0.9**8
        design = ChipletDesign(grid_rows_M=2, grid_cols_N=2, required_cores=4, link_yield=1.0)
        p, _ = mc_chiplet(design, None, SimSettings(mc_iterations=n), yields=ComponentYields(0.9, 0.9, 1.0))
        sigma = binomial_sigma(exact, n)
        assert abs(p - exact) <= 3 * sigma, f"{p} vs {exact}"
        info["detail"] = f"MC {p:.5f}, exact {exact:.5f}, {abs(p - exact) / sigma:.2f} sigma"


def test_4_eta_identity():
    with criterion(4, "eta(t) equals exp(-lam t) within 1e-12 for N = 1..20") as info:
        lam = 0.01
        t = np.linspace(0.0, 2000.0, 2001)
        worst = max(float(np.max(np.abs(degraded_throughput_factor(n, lam)(t) - np.exp(-lam * t))))
                    for n in range(1, 21))
        assert worst < 1e-12, f"max deviation {worst:.3g}"
        info["detail"] = f"max deviation {worst:.2e}"


def argmin(points):
    return min(points, key=lambda p: p.result.lce)


def test_5_degradation_ordering():
    with criterion(5, "degradation-aware LCE <= fail-fast everywhere, same argmin") as info:
        base = load_config("inter-chiplet-12.json")
        axes = load_space("inter-chiplet-sweep.json")
        ff = sweep(base.replace("sim.degradation_enabled", False), axes)
        deg = sweep(base.replace("sim.degradation_enabled", True), axes)
        worse = [p.index for p, q in zip(ff, deg) if q.result.lce > p.result.lce]
        assert not worse, f"degraded LCE above fail-fast at grid points {worse}"
        a, b = argmin(ff), argmin(deg)
        assert a.deltas == b.deltas, f"fail-fast argmin {a.deltas}, degraded argmin {b.deltas}"
        info["detail"] = f"argmin {a.deltas}"


def test_6_combined_redundancy_trend():
    with criterion(6, "module curve has interior min; combined < module-only and < router-only, < 10 min") as info:
        start = time.perf_counter()
        base = load_config()
        modules = SweepAxis("chiplet.redundant_modules_a", tuple(range(9)))
        module_only = sweep(base.replace("chiplet.router_redundancy_enabled", False), [modules])
        combined = sweep(base.replace("chiplet.router_redundancy_enabled", True), [modules])
        router_only = sweep(base.replace("chiplet.redundant_modules_a", 0),
                            [SweepAxis("chiplet.router_redundancy_enabled", (False, True))])
        elapsed = time.perf_counter() - start
        best_module = argmin(module_only)
        lce_module = best_module.result.lce
        lce_combined = argmin(combined).result.lce
        lce_router = argmin(router_only).result.lce
        a_best = best_module.deltas["chiplet.redundant_modules_a"]
        assert 0 < a_best < 8, f"module-only minimum at a={a_best}"
        assert lce_combined < lce_module, f"combined {lce_combined:.6g} >= module-only {lce_module:.6g}"
        assert lce_combined < lce_router, f"combined {lce_combined:.6g} >= router-only {lce_router:.6g}"
        assert elapsed < 600.0, f"took {elapsed:.0f} s"
        info["detail"] = (f"module-only min at a={a_best}; normalised min LCE combined 1, "
                          f"module-only {lce_module / lce_combined:.3f}, router-only {lce_router / lce_combined:.3f}")


def test_7_chiplet_mttf_monotone():
    with criterion(7, "MTTF_chiplet non-decreasing in redundant modules a = 0..8") as info:
        base = load_config()
        designs = [base.replace("chiplet.redundant_modules_a", a).chiplet for a in range(9)]
        values = [mttf(chiplet_reliability(d, base.sim), base.sim) for d in designs]
        drops = [a for a in range(8) if values[a + 1] < values[a]]
        assert not drops, f"MTTF drops after a in {drops}"
        info["detail"] = f"MTTF {values[0]:.4g} -> {values[-1]:.4g}"


PARETO_CAPACITY = 3e9
FRESH_SEED = 987654321


def test_8_pareto_matches_brute_force():
    with criterion(8, "pareto best equals fresh-seed brute force within CI; frontier non-dominated, < 5 min") as info:
        start = time.perf_counter()
        base = load_config()
        space = load_space("demo-space.json")
        res = pareto_min_lce(base, space, PARETO_CAPACITY)

        fresh = {}
        for index, combo in enumerate(itertools.product(*(ax.values for ax in space))):
            cfg = base
            for ax, value in zip(space, combo):
                cfg = cfg.replace(ax.path, value)
            if active_core_transistors(cfg) >= PARETO_CAPACITY:
                fresh[index] = evaluate(cfg.replace("sim.rng_seed", derive_seed(FRESH_SEED, index)))
        elapsed = time.perf_counter() - start
        brute = min(fresh, key=lambda i: fresh[i].lce)

        def rel_ci(r):
            # LCE scales with 1/(Yob * Yci); propagate both 95% half-widths
            return (r.mc_diag.yield_ci_halfwidth / r.chiplet_yield_Yob
                    + r.package_diag.yield_ci_halfwidth / r.bond_yield_mc)

        got, want = fresh[res.best.index], fresh[brute]
        gap = got.lce / want.lce - 1.0
        assert gap <= rel_ci(got) + rel_ci(want), (
            f"best index {res.best.index} is {gap:.2%} above brute-force index {brute}")
        feasible = [p for p in res.points if p.feasible]
        assert {p.index for p in feasible} == set(fresh)
        dominated = [p.index for p in res.frontier if any(dominates(q, p) for q in feasible)]
        assert not dominated, f"dominated frontier points {dominated}"
        assert elapsed < 300.0, f"took {elapsed:.0f} s"
        same = "same point" if brute == res.best.index else f"brute-force index {brute}, gap {gap:.2%}"
        info["detail"] = f"best index {res.best.index} ({same}); {len(res.frontier)} frontier points"


def test_9_sweep_csv_deterministic(tmp_path):
    with criterion(9, "sweep CSV byte-identical across runs, --threads 1 and 8") as info:
        argv = ["sweep", "--seed", "4242", "--axis", "chiplet.redundant_modules_a=0,1,2,3,4,5,6,7,8",
                "--axis", "chiplet.router_redundancy_enabled=false,true"]
        outputs = []
        for run, threads in enumerate((1, 1, 8)):
            out = tmp_path / f"run{run}.csv"
            assert main([*argv, "--threads", str(threads), "--out", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1], "two --threads 1 runs differ"
        assert outputs[0] == outputs[2], "--threads 1 and --threads 8 differ"
        rows = outputs[0].count(b"\n") - 1
        info["detail"] = f"{rows} rows, {len(outputs[0])} bytes"
