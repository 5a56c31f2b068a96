"""Exit criteria for the build, one test per criterion.

Run ``pytest tests/test_acceptance.py`` (or this file directly); a
PASS/FAIL line per criterion is printed in the terminal summary.
"""

import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from ahpising.ensemble import brute_force_partition, gibbs_weight, observables, partition_function
from ahpising.info import cost_of_information, strategy_fisher
from ahpising.market import JudgmentMatrix, decompose
from ahpising.strategy import profit, spin_profit, step_contributions
from ahpising.tropical import clairvoyant, max_profit
from conftest import R_COSTS, R_RETURNS, naive_profits, random_instance

BETAS = (-5.0, -1.0, -0.1, 0.0, 0.1, 1.0, 5.0)
E = math.e


@pytest.fixture(scope="module")
def instance_set():
    rng = np.random.default_rng(20261017)
    out = []
    for _ in range(200):
        n = int(rng.integers(1, 5))
        k = int(rng.integers(1, 7))
        out.append(random_instance(rng, n, k))
    return out


@pytest.mark.acceptance(1, "partition function matches brute force (1e-10 rel)")
def test_01_partition_oracle(instance_set):
    start = time.perf_counter()
    worst = 0.0
    for h, c in instance_set:
        for beta in BETAS:
            a = partition_function(beta, h, c)
            b = brute_force_partition(beta, h, c)
            worst = max(worst, abs(a - b) / max(abs(b), 1e-300) if a != b else 0.0)
    assert worst <= 1e-10, worst
    assert time.perf_counter() - start < 30.0


@pytest.mark.acceptance(2, "tropical max equals brute-force max; clairvoyant realizes it")
def test_02_tropical_exactness(instance_set):
    for h, c in instance_set:
        best = max(naive_profits(h, c).values())
        assert abs(max_profit(h, c) - best) <= 1e-12
        res = clairvoyant(h, c)
        assert abs(res.max_profit - best) <= 1e-12
        assert profit(res.strategy, h, c) == res.max_profit


@pytest.mark.acceptance(3, "reference instance values")
def test_03_reference_instance():
    h, c = R_RETURNS, R_COSTS
    expected = {(0, 0): 3.0, (0, 1): 4.0, (1, 0): 4.0, (1, 1): 7.0}
    assert {s: profit(s, h, c) for s in expected} == expected
    res = clairvoyant(h, c)
    assert res.max_profit == 7.0 and res.strategy.tolist() == [1, 1]
    assert partition_function(-1.0, h, c) == pytest.approx(math.log(E**3 + 2 * E**4 + E**7), rel=1e-12)
    assert gibbs_weight([1, 1], -1.0, h, c) == pytest.approx(0.8945, abs=1e-3)


@pytest.mark.acceptance(4, "T ln Z + E(H) - T S vanishes (1e-9 rel)")
def test_04_thermodynamic_identity(instance_set):
    for h, c in instance_set:
        for beta in BETAS:
            if beta == 0.0:
                continue
            o = observables(beta, h, c)
            t = o.temperature
            scale = max(abs(t * o.log_z), abs(o.expected_profit), abs(t * o.entropy))
            assert abs(o.identity_residual()) <= 1e-9 * scale


@pytest.mark.acceptance(5, "dE/dS converges to 1/beta (1e-3 rel at spacing 1e-3)")
def test_05_temperature_law():
    h, c = R_RETURNS, R_COSTS
    beta = -1.0
    errors = []
    for spacing in (1e-1, 1e-2, 1e-3):
        lo = observables(beta - spacing / 2, h, c)
        hi = observables(beta + spacing / 2, h, c)
        slope = (hi.expected_profit - lo.expected_profit) / (hi.entropy - lo.entropy)
        errors.append(abs(slope - 1 / beta) / abs(1 / beta))
    assert errors[-1] <= 1e-3
    assert errors[0] > errors[1] > errors[2]


@pytest.mark.acceptance(6, "zero-temperature limit: |-T ln Z - 7| <= 0.01 at beta=-50")
def test_06_zero_temperature_limit():
    o = observables(-50.0, R_RETURNS, R_COSTS)
    assert abs(o.free_profit - 7.0) <= 0.01


@pytest.mark.acceptance(7, "spin form equals profit on 1000 random pairs (1e-12)")
def test_07_spin_identity():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        n, k = int(rng.integers(1, 6)), int(rng.integers(1, 9))
        h, c = random_instance(rng, n, k)
        s = rng.integers(0, n, size=k)
        assert abs(spin_profit(s, h, c) - profit(s, h, c)) <= 1e-12


@pytest.mark.acceptance(8, "decomposition round trip (1e-12 rel); reciprocal => zero commission")
def test_08_decomposition():
    rng = np.random.default_rng(8)
    for _ in range(100):
        n = int(rng.integers(1, 8))
        u = np.exp(rng.normal(0.0, 1.5, size=(n, n)))
        np.fill_diagonal(u, 1.0)
        d = decompose(u)
        np.testing.assert_allclose(d.reconstruct(), u, rtol=1e-12, atol=0)
        w = np.exp(rng.normal(0.0, 1.5, size=n))
        assert np.all(decompose(JudgmentMatrix.from_weights(w)).commission == 0.0)


@pytest.mark.acceptance(9, "Fisher information properties")
def test_09_fisher():
    for n in range(1, 4):
        for k in range(1, 6):
            for s in itertools.product(range(n), repeat=k):
                r = strategy_fisher(s, n)
                assert r.total == sum(r.per_criterion)
                assert r.total % 2 == 0
                if len(set(s)) == 1:
                    assert r.total == 0
                c = np.full((n, n), 0.37)
                np.fill_diagonal(c, 0.0)
                _, cost = step_contributions(s, np.zeros((n, k)), c)
                assert abs(cost_of_information(r, 0.37) - cost.sum()) <= 1e-12
    assert strategy_fisher([0, 1, 2], 3).total == 6


@pytest.mark.acceptance(10, "entropy bounds 0 <= S <= k ln N <= Nk ln 2")
def test_10_entropy_bounds(instance_set):
    for h, c in instance_set:
        n, k = h.shape
        for beta in BETAS:
            s = observables(beta, h, c).entropy
            assert 0.0 <= s <= k * math.log(n) + 1e-9
            assert s <= n * k * math.log(2) + 1e-9
        assert abs(observables(0.0, h, c).entropy - k * math.log(n)) <= 1e-10


def _cli(*argv, stdin=None):
    return subprocess.run([sys.executable, "-m", "ahpising", *argv], input=stdin, capture_output=True)


@pytest.mark.acceptance(11, "CLI generate is deterministic and round-trips all subcommands")
def test_11_cli_determinism(tmp_path):
    for n, k, seed in ((1, 1, 0), (2, 2, 1), (3, 4, 2), (4, 3, 18446744073709551615)):
        gen = ("generate", "--n", str(n), "--k", str(k), "--seed", str(seed))
        first, second = _cli(*gen), _cli(*gen)
        assert first.returncode == 0 and first.stdout == second.stdout
        path = tmp_path / f"inst_{n}_{k}.json"
        path.write_bytes(first.stdout)
        strat = ",".join(str(1 + t % n) for t in range(k))
        for cmd in (
            ("decompose",),
            ("profit", "--strategy", strat),
            ("ensemble", "--beta", "-1.5", "--brute-force"),
            ("optimize",),
            ("fisher", "--strategy", strat),
            ("scan", "--beta-from", "-3", "--beta-to", "3", "--points", "7"),
            ("scan", "--beta-from", "-3", "--beta-to", "3", "--points", "7", "--format", "csv"),
        ):
            proc = _cli(*cmd, "--input", str(path))
            assert proc.returncode == 0, (cmd, proc.stderr)
            if "csv" not in cmd:
                json.loads(proc.stdout)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
