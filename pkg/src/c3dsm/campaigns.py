"""Verification campaigns: the exhaustive sweep over canonical n=3 instances,
the multi-path oracle-equivalence cross-check, and the mutual-top-triple
reduction check. Reports are reproducible given identical configuration and
seed (timing fields aside)."""

import decimal
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from math import factorial
from typing import Optional

from . import cnf, model, solver


@dataclass
class CampaignReport:
    campaign: str
    n: int
    instances_checked: int
    counterexamples: list
    min_stable: Optional[int]
    mean_stable: Optional[float]
    elapsed_seconds: float
    seed: Optional[int] = None
    config: dict = field(default_factory=dict)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def lines(self):
        out = [
            f"campaign: {self.campaign}",
            f"n: {self.n}",
            f"instances_checked: {self.instances_checked}",
            f"counterexamples: {len(self.counterexamples)}",
            f"min_stable: {'-' if self.min_stable is None else self.min_stable}",
            f"mean_stable: {'-' if self.mean_stable is None else f'{self.mean_stable:.4f}'}",
            f"seed: {'-' if self.seed is None else self.seed}",
        ]
        for k in sorted(self.config):
            out.append(f"config.{k}: {self.config[k]}")
        for k in sorted(self.extras):
            out.append(f"{k}: {self.extras[k]}")
        out.append(f"elapsed_seconds: {self.elapsed_seconds:.2f}")
        out.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        for i, cex in enumerate(self.counterexamples):
            out.append(f"counterexample {i}:")
            out.extend("  " + line for line in cex.rstrip("\n").splitlines())
        return out

    def format(self) -> str:
        return "\n".join(self.lines()) + "\n"


def _merge_stride_results(parts):
    checked = 0
    mn = None
    total = 0
    cex = []
    for p_checked, p_mn, p_total, p_cex in parts:
        checked += p_checked
        total += p_total
        if p_mn is not None and (mn is None or p_mn < mn):
            mn = p_mn
        cex.extend(p_cex)
    cex.sort(key=lambda item: item[0])
    return checked, mn, total, cex


def _sweep_worker(args):
    n, offset, step, threshold = args
    checked = 0
    mn = None
    total = 0
    cex = []
    for idx, inst in enumerate(model.canonical_instances(n)):
        if idx % step != offset:
            continue
        c = model.count_stable_matchings(inst)
        checked += 1
        total += c
        if mn is None or c < mn:
            mn = c
        if c < threshold:
            cex.append((idx, f"# canonical index {idx}, stable matchings: {c}\n"
                             + model.serialize_instance(inst)))
    return checked, mn, total, cex


def verify_exhaustive(n: int = 3, jobs: int = 1, min_required: int = 2) -> CampaignReport:
    """Count stable matchings for every canonical instance of size n.

    Counterexamples are instances with fewer than min_required stable
    matchings (default 2: existence plus a second distinct one).
    """
    if n != 3:
        raise ValueError("the exhaustive sweep is defined for n=3")
    start = time.monotonic()
    expected = factorial(n) ** (3 * (n - 1)) * (n - 1)
    work = [(n, off, max(jobs, 1), min_required) for off in range(max(jobs, 1))]
    if jobs <= 1:
        parts = [_sweep_worker(work[0])]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_sweep_worker, work))
    checked, mn, total, cex = _merge_stride_results(parts)
    elapsed = time.monotonic() - start
    return CampaignReport(
        campaign="verify-n3", n=n, instances_checked=checked,
        counterexamples=[text for _, text in cex],
        min_stable=mn, mean_stable=total / checked if checked else None,
        elapsed_seconds=elapsed, seed=None,
        config={"jobs": jobs, "min_required": min_required},
        extras={"expected_instances": expected})


def _trial_seeds(seed: int, trials: int):
    rng = random.Random(seed)
    return [rng.getrandbits(63) for _ in range(trials)]


_ASSUMPTION_FORMULAS = {}


def _assumption_formula(n):
    # variant F without the extra c1 unit, so any canonicalized instance is
    # consistent with the remaining symmetry units
    if n not in _ASSUMPTION_FORMULAS:
        _ASSUMPTION_FORMULAS[n] = cnf.build_f(n, include_c1_clause=False)
    return _ASSUMPTION_FORMULAS[n]


def _oracle_worker(args):
    n, offset, step, seeds, use_solver, mutate = args
    checked = 0
    mn = None
    total = 0
    cex = []
    vm = cnf.VarMap(n)
    for idx in range(offset, len(seeds), step):
        inst = model.random_instance(n, seeds[idx])
        s = model.count_stable_matchings(inst)
        checked += 1
        total += s
        if mn is None or s < mn:
            mn = s
        claims = {
            "brute_force_no_stable": s == 0,
            "cnf_eval_no_stable": cnf.evaluate_no_stable(
                inst, _c_conjunct_uses_b_partner=mutate),
        }
        if use_solver:
            canon = model.canonicalize(inst)
            asm = cnf.instance_assumptions(vm, canon)
            res = solver.solve(_assumption_formula(n), assumptions=asm)
            claims["solver_no_stable"] = res.verdict == solver.SAT
        if len(set(claims.values())) != 1:
            detail = ", ".join(f"{k}={v}" for k, v in claims.items())
            cex.append((idx, f"# trial {idx}, seed {seeds[idx]}: {detail}\n"
                             + model.serialize_instance(inst)))
    return checked, mn, total, cex


def oracle_equivalence(n: int, trials: int = 1000, seed: int = 0, jobs: int = 1,
                       use_solver: Optional[bool] = None,
                       _c_conjunct_uses_b_partner: bool = False) -> CampaignReport:
    """Cross-check, per random instance, that brute force, solver-free CNF
    evaluation and (n=3) assumption-based solving agree on whether the
    instance lacks a stable matching."""
    if n not in (3, 4):
        raise ValueError("oracle equivalence runs at n=3 or n=4")
    if trials < 1:
        raise ValueError("need at least one trial")
    if use_solver is None:
        use_solver = n == 3
    start = time.monotonic()
    seeds = _trial_seeds(seed, trials)
    jobs = max(jobs, 1)
    work = [(n, off, jobs, seeds, use_solver, _c_conjunct_uses_b_partner)
            for off in range(jobs)]
    if jobs == 1:
        parts = [_oracle_worker(work[0])]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            parts = list(pool.map(_oracle_worker, work))
    checked, mn, total, cex = _merge_stride_results(parts)
    elapsed = time.monotonic() - start
    return CampaignReport(
        campaign="oracle-check", n=n, instances_checked=checked,
        counterexamples=[text for _, text in cex],
        min_stable=mn, mean_stable=total / checked if checked else None,
        elapsed_seconds=elapsed, seed=seed,
        config={"trials": trials, "jobs": jobs, "use_solver": use_solver,
                "mutated": _c_conjunct_uses_b_partner},
        extras={"paths": 3 if use_solver else 2})


def remark1_check(n: int, trials: int = 10000, seed: int = 0) -> CampaignReport:
    """Sample random instances; wherever a mutual top triple exists, verify
    that extending any stable matching of the reduced instance by the triple
    stays stable in the original instance."""
    if not 3 <= n <= 5:
        raise ValueError("the reduction check runs at n in 3..5")
    start = time.monotonic()
    seeds = _trial_seeds(seed, trials)
    checked = 0
    with_triple = 0
    extensions = 0
    cex = []
    for idx, s in enumerate(seeds):
        inst = model.random_instance(n, s)
        checked += 1
        t = model.mutual_top_triple(inst)
        if t is None:
            continue
        with_triple += 1
        reduced = model.reduce_by_triple(inst, t)
        stable_reduced = model.stable_matchings(reduced)
        if not stable_reduced:
            cex.append(f"# trial {idx}, seed {s}: reduced instance has no stable matching\n"
                       + model.serialize_instance(inst))
            continue
        for m_red in stable_reduced:
            extensions += 1
            ext = model.extend_matching(m_red, t)
            if not model.is_stable(inst, ext):
                cex.append(f"# trial {idx}, seed {s}: extension by {tuple(t)} of "
                           f"sigma={m_red.sigma} tau={m_red.tau} is unstable\n"
                           + model.serialize_instance(inst))
    elapsed = time.monotonic() - start
    return CampaignReport(
        campaign="remark1-check", n=n, instances_checked=checked,
        counterexamples=cex, min_stable=None, mean_stable=None,
        elapsed_seconds=elapsed, seed=seed,
        config={"trials": trials},
        extras={"with_mutual_top_triple": with_triple,
                "skipped_without_triple": checked - with_triple,
                "extensions_verified": extensions,
                "triple_fraction": round(with_triple / checked, 4) if checked else 0.0})


def _sci(x: int) -> str:
    # 3 significant digits, exact for arbitrarily large ints
    d = decimal.Context(prec=3).create_decimal(x)
    text = f"{d:E}".replace("E", "e")
    mant, exp = text.split("e")
    if "." not in mant:
        mant += ".00"
    return f"{mant.ljust(4, '0')}e{exp}"


def instance_count(n: int) -> int:
    """Number of labeled instances of size n: one permutation per agent."""
    return factorial(n) ** (3 * n)


def reduced_instance_count(n: int) -> int:
    """Lower bound on instances remaining after symmetry elimination."""
    return factorial(n) ** (3 * (n - 1)) // 3


def stats_report(n_values, variant: str = "F") -> str:
    """Formula sizes plus instance-count figures for each n, as text."""
    blocks = []
    for n in n_values:
        st = cnf.predict_sizes(n, variant)
        lines = st.lines()
        total = instance_count(n)
        reduced = reduced_instance_count(n)
        lines.append(f"instances_total: {total}")
        lines.append(f"instances_total_sci: {_sci(total)}")
        lines.append(f"instances_after_symmetry: {reduced}")
        lines.append(f"instances_after_symmetry_sci: {_sci(reduced)}")
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"
