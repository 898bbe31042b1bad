"""Acceptance suite: one test per criterion, at its stated tolerance and
runtime budget, printing one pass/fail line each (run with -s to see them).
"""
import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from qcalc import (
    SCENARIO_EXPECTATIONS,
    SCENARIO_FAMILY,
    SCENARIO_NAMES,
    AnalyzerConfig,
    break_stats,
    build_scenario,
    chain_invisibility,
    chain_transparency,
    check_bearing,
    check_import,
    check_invisibility,
    check_transparency,
    exhaustive_break_bound_check,
    pair_correlation,
    qq_empty,
    sample_pair,
    tail_log10,
    triangle_bound,
)
from qcalc.cli import main
from qcalc.report import RunConfig
from qcalc.suites import run_identity_suite

PASS_TOL = 1e-9
FAIL_THRESHOLD = 1e-3


class _Budget:
    def __init__(self, number, name, seconds):
        self.number, self.name, self.seconds = number, name, seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.start
        verdict = "PASS" if exc_type is None and elapsed < self.seconds else "FAIL"
        print(
            f"ACCEPTANCE {self.number} {self.name}: {verdict} "
            f"({elapsed:.2f}s / budget {self.seconds:.0f}s)"
        )
        assert elapsed < self.seconds, f"runtime budget exceeded: {elapsed:.2f}s"
        return False


def test_1_correlation_reproduction(tmp_path, capsys):
    with _Budget(1, "correlation reproduction", 1.0):
        path = tmp_path / "corr.json"
        code = main(
            ["bell", "correlations", "--angles", "0,90,45,-45", "--json", str(path)]
        )
        assert code == 0
        values = {
            row["name"]: row["value"]
            for row in json.loads(path.read_text())["results"]
        }
        for pair in ("AJ", "AK", "BJ"):
            assert abs(values[f"same_rate[{pair}]"] - 0.8535533906) <= 1e-9
        assert abs(values["same_rate[BK]"] - 0.1464466094) <= 1e-9


def test_2_break_bound():
    with _Budget(2, "break bound", 120.0):
        assert triangle_bound(0.15, 0.15, 0.15) == 0.45
        covered, counterexamples = exhaustive_break_bound_check(8)
        assert covered == 2 ** 32
        assert counterexamples == []


def test_3_qq_emptiness():
    with _Budget(3, "QQ emptiness", 60.0):
        empty, certificate = qq_empty(1_000_000, favored=0.85, epsilon=0.01)
        assert empty
        assert certificate["required_break_rate"] == 0.84
        assert certificate["triangle_break_rate_max"] == 0.48
        assert certificate["inequality"] == "0.84 > 0.48"

        nonempty, certificate = qq_empty(10, favored=0.70, epsilon=0.0)
        assert nonempty is False
        witness = certificate["witness"]
        assert certificate["witness_method"] == "exhaustive search"
        assert witness["rate_BK"] >= 0.7
        for link in ("rate_BJ", "rate_JA", "rate_AK"):
            assert witness[link] <= 0.3


def test_4_tail_probability():
    with _Budget(4, "tail probability", 30.0):
        value = tail_log10(1_000_000, 0.85, 0.84, 0.86)
        assert -175.0 <= value <= -160.0
        # cross-check against naive summation for n <= 1000
        for n in (50, 200, 1000):
            total = 0.0
            for k in range(n + 1):
                if Fraction("0.84") <= Fraction(k, n) <= Fraction("0.86"):
                    continue
                total += math.comb(n, k) * 0.85 ** k * 0.15 ** (n - k)
            assert tail_log10(n, 0.85, 0.84, 0.86) == pytest.approx(
                math.log10(total), rel=1e-10
            )


def test_5_identity_suite():
    with _Budget(5, "identity suite", 60.0):
        rows = run_identity_suite(RunConfig(seed=42), instances=200)
        by_name = {row["name"]: row for row in rows}
        for name in (
            "identity/innocence-of-disjoint-observations",
            "identity/sequential-conditioning",
            "identity/staged-instrument-reduction",
        ):
            row = by_name[name]
            assert row["details"]["instances"] == 200
            assert row["deviation"] < 1e-9, (name, row["deviation"])


def test_6_criterion_scenario_matrix():
    with _Budget(6, "criterion scenario matrix", 60.0):
        x, inst, prim = build_scenario("pointer_nondisturbing", dims=2, seed=42)
        for s in inst.look.elements:
            for t in prim.elements:
                assert check_import(x, inst, s, t).max_deviation < 1e-9
        assert all(
            check_transparency(x, inst, t).max_deviation < 1e-9
            for t in prim.elements
        )

        x, inst, prim = build_scenario("pointer_disturbing", dims=2, seed=42)
        worst = max(
            check_transparency(x, inst, t).max_deviation for t in prim.elements
        )
        assert worst >= 1e-3

        x, inst, prim = build_scenario("memory_antenna", dims=2, seed=42)
        assert all(
            check_bearing(x, inst, s, t).max_deviation < 1e-9
            for s in inst.look.elements
            for t in prim.elements
        )
        assert all(
            check_invisibility(x, inst, t).max_deviation < 1e-9
            for t in prim.elements
        )

        x, inst, prim = build_scenario("memory_antenna_violating", dims=2, seed=42)
        worst = max(
            check_invisibility(x, inst, t).max_deviation for t in prim.elements
        )
        assert worst >= 1e-3


def test_7_chain_certification():
    with _Budget(7, "chain certification", 60.0):
        for name in SCENARIO_NAMES:
            x, inst, prim = build_scenario(name, dims=2, seed=42)
            chain = (
                chain_transparency(x, inst, prim)
                if SCENARIO_FAMILY[name] == "pointer"
                else chain_invisibility(x, inst, prim)
            )
            if SCENARIO_EXPECTATIONS[name]["chain"] == "pass":
                assert all(dev < 1e-9 for _, dev in chain.steps), (name, chain.steps)
            else:
                broken = [label for label, dev in chain.steps if dev >= 1e-3]
                assert broken, (name, chain.steps)
                assert broken[0] in chain.witness


def test_8_born_timelessness():
    with _Budget(8, "Born timelessness", 10.0):
        from qcalc import CoOrbit, Orbit, born, conjugate, fspace, random_density
        from qcalc import random_effect, random_unitary

        worst = 0.0
        for seed in range(1000):
            rng = np.random.default_rng(seed)
            d = int(rng.integers(2, 5))
            space = fspace(("x", d))
            p = Orbit(random_density(space, rng), pegged=True)
            s = CoOrbit(random_effect(space, rng))
            u = random_unitary(space, rng)
            moved = born(
                Orbit(conjugate(p.op, u), pegged=True),
                CoOrbit(conjugate(s.eff, u)),
            )
            worst = max(worst, abs(moved - born(p, s)))
        assert worst <= 1e-10, worst


def test_9_monte_carlo_coherence():
    with _Budget(9, "Monte Carlo coherence", 30.0):
        cfg = AnalyzerConfig.from_degrees(0, 90, 45, -45)
        exact = pair_correlation(cfg).aj
        deviations = []
        for seed in range(30):
            left, right = sample_pair(cfg, "AJ", 100_000, seed)
            _, break_rate = break_stats(left, right)
            deviations.append(abs((1.0 - break_rate) - exact))
        assert float(np.mean(deviations)) < 0.003
