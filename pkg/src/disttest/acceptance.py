"""The acceptance suite: one function per verification criterion.

Every criterion runs with fixed published seeds from ``acceptance_config.json``
and reports a deterministic metrics string (wall time excluded), so two runs
of the suite are comparable byte for byte.  The same functions back both
``pytest tests/test_acceptance.py`` and the ``disttest accept`` subcommand.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .adversarial import (
    build_pairing,
    collision_rate,
    make_adversarial_pair,
    pair_collision_bound,
    verify_adversarial,
)
from .core import (
    Distribution,
    NonConcentrationParams,
    SamplingOracle,
    additive_chernoff_bound,
    derive_seed,
    is_non_concentrated,
    l1_distance,
    multiplicative_chernoff_bound,
    sorted_l1_distance,
)
from .learner import IdentityTestParams, learn_adaptive, learn_known_support, tol_identity_test
from .linprop import Polyhedron, linear_property_oracle, lp_feasible, uniformity_polyhedron
from .reference import min_permutation_l1, min_subset_mass, vertex_enumeration_feasible
from .tester import Verdict, derive_params, estimate_high_part, tolerant_test


def load_config() -> dict:
    text = resources.files("disttest").joinpath("acceptance_config.json").read_text()
    return json.loads(text)


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12e}"


def _metrics(**kv) -> str:
    return ";".join(f"{k}={_fmt(v)}" for k, v in kv.items())


@dataclass(frozen=True)
class CriterionResult:
    cid: str
    name: str
    passed: bool
    metrics: str
    elapsed_s: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.cid}  {self.name}  [{self.metrics}]  ({self.elapsed_s:.2f}s)"


def _rng(seed, *key) -> np.random.Generator:
    return np.random.default_rng([int(seed), *map(int, key)])


def _dirichlet_pmf(rng, n) -> np.ndarray:
    raw = rng.exponential(size=n)
    return raw / raw.sum()


def criterion_01_sorted_distance(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    max_dev = 0.0
    for n in cfg["n_values"]:
        rng = _rng(cfg["seed"], n)
        for _ in range(cfg["pairs_per_n"]):
            a = Distribution(_dirichlet_pmf(rng, n))
            b = Distribution(_dirichlet_pmf(rng, n))
            dev = abs(sorted_l1_distance(a, b) - min_permutation_l1(a.pmf, b.pmf))
            max_dev = max(max_dev, dev)
    elapsed = time.perf_counter() - t0
    passed = max_dev <= cfg["tol"] and elapsed < cfg["budget_s"]
    return CriterionResult(
        "criterion-01",
        "sorted-distance equals exhaustive permutation minimum",
        passed,
        _metrics(max_deviation=max_dev),
        elapsed,
    )


def criterion_02_non_concentration(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    rng = _rng(cfg["seed"])
    params = NonConcentrationParams(cfg["alpha"], cfg["beta"])
    k = math.floor(cfg["beta"] * cfg["n"])
    agreements = 0
    for _ in range(cfg["trials"]):
        d = Distribution(_dirichlet_pmf(rng, cfg["n"]))
        brute = min_subset_mass(d.pmf, k) >= cfg["alpha"]
        agreements += is_non_concentrated(d, params) == brute
    elapsed = time.perf_counter() - t0
    passed = agreements == cfg["trials"] and elapsed < cfg["budget_s"]
    return CriterionResult(
        "criterion-02",
        "non-concentration equals subset enumeration",
        passed,
        _metrics(agreements=agreements, trials=cfg["trials"]),
        elapsed,
    )


def criterion_03_chernoff_envelope(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    p = cfg["p"]
    trials = cfg["trials"]
    worst = -np.inf
    ok = True
    for n in cfg["grid_n"]:
        for delta in cfg["grid_delta"]:
            rng = _rng(cfg["seed"], n, int(delta * 1000))
            x = rng.binomial(n, p, size=trials)
            mu = n * p
            freq_mult = float(np.mean(np.abs(x - mu) >= delta * mu))
            bound_mult = multiplicative_chernoff_bound(mu, delta)
            dev = delta * n
            freq_up = float(np.mean(x >= mu + dev))
            freq_dn = float(np.mean(x <= mu - dev))
            bound_add = additive_chernoff_bound(n, dev)
            ok &= freq_mult <= bound_mult and freq_up <= bound_add and freq_dn <= bound_add
            worst = max(
                worst, freq_mult - bound_mult, freq_up - bound_add, freq_dn - bound_add
            )
    elapsed = time.perf_counter() - t0
    passed = ok and elapsed < cfg["budget_s"]
    return CriterionResult(
        "criterion-03",
        "empirical tails stay under both Chernoff bounds (3x3 grid)",
        passed,
        _metrics(worst_excess=worst),
        elapsed,
    )


def _tester_bundle(cfg) -> dict:
    """Shared runs for criteria 4 and 5."""
    n = cfg["n"]
    params = derive_params(cfg["lambda"], cfg["gamma1"], cfg["gamma2"], n)
    prop = linear_property_oracle(uniformity_polyhedron(n, 0.0))
    uniform = Distribution.uniform(n)
    half = Distribution.uniform_on(range(n // 2), n)
    threshold = params.eta_prime / params.q**2
    high_true = frozenset(int(i) for i in np.flatnonzero(uniform.pmf >= threshold))

    accepts = rejects = 0
    containment = lem3 = 0
    exact_consumption = True
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for i in range(cfg["runs"]):
            seed_yes = derive_seed(cfg["seed"], 2 * i)
            oracle = SamplingOracle(uniform, seed_yes)
            verdict = tolerant_test(oracle, prop, params, n)
            accepts += verdict is Verdict.ACCEPT
            exact_consumption &= oracle.samples_drawn == params.W + params.Z_size
            replay = estimate_high_part(SamplingOracle(uniform, seed_yes), params, n)
            containment += high_true <= replay.H
            err = sum(abs(uniform.pmf[j] - replay.d_tilde.pmf[j]) for j in replay.H)
            lem3 += err <= 10 * params.eta_prime

            oracle_no = SamplingOracle(half, derive_seed(cfg["seed"], 2 * i + 1))
            verdict_no = tolerant_test(oracle_no, prop, params, n)
            rejects += verdict_no is Verdict.REJECT
            exact_consumption &= oracle_no.samples_drawn == params.W + params.Z_size
    return {
        "params": params,
        "accepts": accepts,
        "rejects": rejects,
        "containment": containment,
        "lem3": lem3,
        "exact_consumption": exact_consumption,
    }


def criterion_04_tolerant_tester(cfg, bundle, elapsed: float) -> CriterionResult:
    ok = (
        bundle["accepts"] >= cfg["min_successes"]
        and bundle["rejects"] >= cfg["min_successes"]
        and bundle["exact_consumption"]
    )
    passed = ok and elapsed < cfg["budget_s"]
    p = bundle["params"]
    return CriterionResult(
        "criterion-04",
        "tolerant tester accepts uniform / rejects half-support (LP oracle)",
        passed,
        _metrics(
            accepts=bundle["accepts"],
            rejects=bundle["rejects"],
            runs=cfg["runs"],
            W=p.W,
            Z_size=p.Z_size,
            exact_consumption=bundle["exact_consumption"],
        ),
        elapsed,
    )


def criterion_05_estimator_diagnostics(cfg4, cfg5, bundle) -> CriterionResult:
    need = math.ceil(cfg5["min_fraction"] * cfg4["runs"])
    passed = bundle["containment"] >= need and bundle["lem3"] >= need
    return CriterionResult(
        "criterion-05",
        "heavy-set containment and summed-error bound during tester runs",
        passed,
        _metrics(
            containment=bundle["containment"],
            summed_error_ok=bundle["lem3"],
            needed=need,
            runs=cfg4["runs"],
        ),
        0.0,
    )


def criterion_06_lp_oracle(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    rng = _rng(cfg["seed"])
    agreements = 0
    for _ in range(cfg["systems"]):
        nv = int(rng.integers(1, cfg["max_vars"] + 1))
        mr = int(rng.integers(1, cfg["max_rows"] + 1))
        A = rng.uniform(-2, 2, size=(mr, nv))
        b = rng.uniform(-2, 2, size=mr)
        agreements += lp_feasible(Polyhedron(A, b)) == vertex_enumeration_feasible(A, b)
    prop = uniformity_polyhedron(4, 0.1)
    uniform_in = prop.contains(Distribution.uniform(4))
    point_out = not prop.contains(Distribution.point_mass(4, 0))
    elapsed = time.perf_counter() - t0
    passed = agreements == cfg["systems"] and uniform_in and point_out and elapsed < cfg["budget_s"]
    return CriterionResult(
        "criterion-06",
        "LP feasibility equals vertex enumeration; uniformity classification",
        passed,
        _metrics(
            agreements=agreements,
            systems=cfg["systems"],
            uniform_in=uniform_in,
            point_excluded=point_out,
        ),
        elapsed,
    )


def criterion_07_adversarial_structure(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    params = NonConcentrationParams(cfg["alpha"], cfg["beta"])
    n = cfg["n"]
    # With alpha = beta = 0.2 and an integral beta*n, the uniform distribution
    # is the only non-concentrated source; the randomness lives in the pairing
    # and the merge coins.
    d_yes = Distribution.uniform(n)
    support_cap = n - math.floor(cfg["beta"] * n)
    ok_label = ok_general = 0
    for i in range(cfg["instances"]):
        pair_li = make_adversarial_pair(d_yes, params, "label-invariant", _rng(cfg["seed"], i, 0))
        rep_li = verify_adversarial(pair_li)
        ok_label += rep_li.passed and rep_li.support_size <= support_cap
        pair_g = make_adversarial_pair(d_yes, params, "general", _rng(cfg["seed"], i, 1))
        rep_g = verify_adversarial(pair_g)
        ok_general += rep_g.passed and rep_g.support_size <= support_cap
    elapsed = time.perf_counter() - t0
    passed = (
        ok_label == cfg["instances"] and ok_general == cfg["instances"] and elapsed < cfg["budget_s"]
    )
    return CriterionResult(
        "criterion-07",
        "both adversarial constructions verify exactly (100 instances)",
        passed,
        _metrics(label_invariant_ok=ok_label, general_ok=ok_general, instances=cfg["instances"]),
        elapsed,
    )


def criterion_08_collision_regime(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    d = Distribution.uniform(cfg["n"])
    pairing = build_pairing(d, cfg["beta"], _rng(cfg["seed"], 0))
    rate = collision_rate(d, pairing, cfg["m"], cfg["trials"], _rng(cfg["seed"], 1))
    bound = pair_collision_bound(d, pairing, cfg["m"])
    sigma = math.sqrt(bound * (1 - bound) / cfg["trials"])
    elapsed = time.perf_counter() - t0
    passed = rate <= bound + 3 * sigma and elapsed < cfg["budget_s"]
    return CriterionResult(
        "criterion-08",
        "same-pair collision rate under the union bound (birthday regime)",
        passed,
        _metrics(rate=rate, union_bound=bound, sigma=sigma),
        elapsed,
    )


def criterion_09_conditional_law(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    n = cfg["n"]
    gen = _rng(cfg["seed"], 0)
    raw = gen.exponential(size=n)
    pmf = cfg["theta"] / n + (1 - cfg["theta"]) * raw / raw.sum()
    d_yes = Distribution(pmf / pmf.sum())
    pairing = build_pairing(d_yes, cfg["beta"], None)

    trials = cfg["draws"]
    draw_gen = _rng(cfg["seed"], 1)
    coins = draw_gen.random((trials, pairing.size))
    pmfs = np.tile(d_yes.pmf, (trials, 1))
    for t, (x, y) in enumerate(pairing.pairs):
        total = d_yes.pmf[x] + d_yes.pmf[y]
        to_x = coins[:, t] < (d_yes.pmf[x] / total if total > 0 else 1.0)
        pmfs[to_x, x] = total
        pmfs[to_x, y] = 0.0
        pmfs[~to_x, x] = 0.0
        pmfs[~to_x, y] = total
    cdfs = np.cumsum(pmfs, axis=1)
    u = draw_gen.random(trials)
    draws = (cdfs < (u * cdfs[:, -1])[:, None]).sum(axis=1)

    ids = pairing.pair_ids(n)[draws]
    max_dev = 0.0
    for t, (x, y) in enumerate(pairing.pairs):
        expect = d_yes.pmf[x] / (d_yes.pmf[x] + d_yes.pmf[y])
        in_pair = ids == t
        freq = float(np.mean(draws[in_pair] == x))
        max_dev = max(max_dev, abs(freq - expect))
    elapsed = time.perf_counter() - t0
    passed = max_dev <= cfg["tol"] and elapsed < cfg["budget_s"]
    return CriterionResult(
        "criterion-09",
        "within-pair conditional law matches the mass ratio (d_no ensemble)",
        passed,
        _metrics(max_deviation=max_dev, tol=cfg["tol"]),
        elapsed,
    )


def criterion_10_known_support(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    d = Distribution.uniform_on(range(cfg["support"]), cfg["n"])
    successes = 0
    for i in range(cfg["seeds"]):
        oracle = SamplingOracle(d, derive_seed(cfg["seed"], i))
        learned = learn_known_support(oracle, cfg["support"], cfg["delta"])
        successes += l1_distance(learned, d) <= cfg["delta"]
    elapsed = time.perf_counter() - t0
    passed = successes >= cfg["min_successes"] and elapsed < cfg["budget_s"]
    return CriterionResult(
        "criterion-10",
        "known-support learner succeeds at rate >= 9/10",
        passed,
        _metrics(successes=successes, seeds=cfg["seeds"]),
        elapsed,
    )


def criterion_11_adaptive_learner(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    d = Distribution.uniform_on(range(cfg["support"]), cfg["n"])
    successes = 0
    good_guesses = 0
    totals = []
    for i in range(cfg["seeds"]):
        oracle = SamplingOracle(d, derive_seed(cfg["seed"], i))
        res = learn_adaptive(
            oracle, eta=0.0, delta=cfg["delta"], n=cfg["n"], c_test=cfg["c_test"]
        )
        totals.append(res.total_samples)
        if res.learned and l1_distance(res.distribution, d) <= cfg["delta"]:
            successes += 1
            good_guesses += res.final_guess <= cfg["guess_cap_factor"] * cfg["support"]
    mean_samples = float(np.mean(totals))
    sample_cap = cfg["sample_cap_factor"] * 8.0 * cfg["support"] / cfg["delta"] ** 2
    elapsed = time.perf_counter() - t0
    passed = (
        successes >= cfg["min_successes"]
        and (successes == 0 or good_guesses >= cfg["guess_fraction"] * successes)
        and mean_samples <= sample_cap
        and elapsed < cfg["budget_s"]
    )
    return CriterionResult(
        "criterion-11",
        "adaptive learner: success rate, guess cap, and sample budget",
        passed,
        _metrics(
            successes=successes,
            seeds=cfg["seeds"],
            good_guesses=good_guesses,
            mean_samples=mean_samples,
            sample_cap=sample_cap,
        ),
        elapsed,
    )


def criterion_12_identity_test(cfg) -> CriterionResult:
    t0 = time.perf_counter()
    n = cfg["n"]
    s = cfg["s"]
    d_k = Distribution.uniform_on(range(s), n)
    params = IdentityTestParams(cfg["eps1"], cfg["eps2"], cfg["kappa"])
    far_pmf = np.zeros(n)
    far_pmf[:s] = (1.0 - cfg["eps2"] / 2.0) / s
    far_pmf[s] = cfg["eps2"] / 2.0
    d_far = Distribution(far_pmf)
    assert abs(l1_distance(d_far, d_k) - cfg["eps2"]) < 1e-12

    accepts = rejects = 0
    for i in range(cfg["seeds"]):
        o_eq = SamplingOracle(d_k, derive_seed(cfg["seed"], 2 * i))
        accepts += tol_identity_test(o_eq, d_k, params) is Verdict.ACCEPT
        o_far = SamplingOracle(d_far, derive_seed(cfg["seed"], 2 * i + 1))
        rejects += tol_identity_test(o_far, d_k, params) is Verdict.REJECT
    need = math.ceil((1.0 - cfg["kappa"]) * cfg["seeds"])
    elapsed = time.perf_counter() - t0
    passed = accepts >= need and rejects >= need and elapsed < cfg["budget_s"]
    return CriterionResult(
        "criterion-12",
        "identity-test substitute: accept/reject rates >= 1 - kappa",
        passed,
        _metrics(accepts=accepts, rejects=rejects, needed=need, seeds=cfg["seeds"]),
        elapsed,
    )


def run_all(config: dict | None = None) -> list:
    """Run criteria 1 through 12 once, in order."""
    cfg = (config or load_config())["criteria"]
    results = []
    results.append(criterion_01_sorted_distance(cfg["c01"]))
    results.append(criterion_02_non_concentration(cfg["c02"]))
    results.append(criterion_03_chernoff_envelope(cfg["c03"]))
    t0 = time.perf_counter()
    bundle = _tester_bundle(cfg["c04"])
    results.append(criterion_04_tolerant_tester(cfg["c04"], bundle, time.perf_counter() - t0))
    results.append(criterion_05_estimator_diagnostics(cfg["c04"], cfg["c05"], bundle))
    results.append(criterion_06_lp_oracle(cfg["c06"]))
    results.append(criterion_07_adversarial_structure(cfg["c07"]))
    results.append(criterion_08_collision_regime(cfg["c08"]))
    results.append(criterion_09_conditional_law(cfg["c09"]))
    results.append(criterion_10_known_support(cfg["c10"]))
    results.append(criterion_11_adaptive_learner(cfg["c11"]))
    results.append(criterion_12_identity_test(cfg["c12"]))
    return results


def criterion_13_determinism(first: list, second: list) -> CriterionResult:
    """Byte-identical metric columns across two full runs of the suite."""
    same = [a.metrics == b.metrics for a, b in zip(first, second)]
    passed = all(same) and len(first) == len(second)
    return CriterionResult(
        "criterion-13",
        "full suite rerun produces byte-identical metric columns",
        passed,
        _metrics(identical=sum(same), criteria=len(first)),
        0.0,
    )


def run_acceptance_suite(stream=None) -> int:
    """Run every criterion, print one pass/fail line each, return an exit code."""
    import sys

    out = stream or sys.stdout
    first = run_all()
    for res in first:
        print(res.line(), file=out)
    second = run_all()
    det = criterion_13_determinism(first, second)
    print(det.line(), file=out)
    all_passed = all(r.passed for r in first) and det.passed
    return 0 if all_passed else 1
