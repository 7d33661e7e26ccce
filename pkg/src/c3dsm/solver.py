"""Satisfiability engines: an embedded conflict-driven solver sized for the
small formulas of this toolkit, plus an adapter that runs any external
DIMACS solver speaking the SAT-competition output conventions.

The embedded solver is a plain CDCL: two-watched-literal propagation with a
dedicated binary-implication store, first-UIP clause learning with recursive
minimization, activity-based decisions with phase saving, Luby restarts and
activity-based learned-clause reduction. It is fully deterministic.
"""

import shlex
import subprocess
import time
from dataclasses import dataclass, field
from heapq import heapify, heappop, heappush
from typing import Optional

from .cnf import CnfFormula, read_dimacs

SAT = "SAT"
UNSAT = "UNSAT"
UNKNOWN = "UNKNOWN"


class ExternalSolverError(RuntimeError):
    """The external solver failed to run or produced unusable output."""


@dataclass
class SolveStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    learned: int = 0
    reductions: int = 0
    wall_time: float = 0.0


@dataclass
class SolveResult:
    verdict: str
    model: Optional[list] = None  # model[v] is the value of variable v; [0] unused
    stats: SolveStats = field(default_factory=SolveStats)
    output: Optional[str] = None  # raw output of an external solver, when any

    def __post_init__(self):
        if (self.model is not None) != (self.verdict == SAT):
            raise ValueError("model must be present exactly for SAT verdicts")


def _luby(x: int) -> int:
    # Luby sequence 1 1 2 1 1 2 4 ... for x = 0, 1, 2, ...
    size, seq = 1, 0
    while size < x + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != x:
        size = (size - 1) // 2
        seq -= 1
        x %= size
    return 1 << seq


class _LearntClause(list):
    __slots__ = ("act",)


class _Cdcl:
    def __init__(self, num_vars: int):
        nv = num_vars
        self.nv = nv
        self.off = nv
        size = 2 * nv + 1
        self.val = [0] * size              # val[off + lit]: 1 true, -1 false
        self.imp = [[] for _ in range(size)]      # binary implications
        self.watches = [[] for _ in range(size)]  # clause refs per watched lit
        self.clauses = []      # problem clauses of length >= 3
        self.learnts = []
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.level = [0] * (nv + 1)
        self.reason = [None] * (nv + 1)
        self.act = [0.0] * (nv + 1)
        self.var_inc = 1.0
        self.heap = []
        self.phase = bytearray(nv + 1)
        self.seen = bytearray(nv + 1)
        self.ok = True
        self.stats = SolveStats()
        self.cla_inc = 1.0

    # ------------------------------------------------------------ setup

    def add_clause(self, lits) -> bool:
        """Add a problem clause at level 0; False means the formula is
        already contradictory (empty clause or conflicting units)."""
        if not self.ok:
            return False
        seen = set()
        cl = []
        for lit in lits:
            if lit in seen:
                continue
            if -lit in seen:
                return True  # tautology, always satisfied
            v = self.val[self.off + lit]
            if v > 0:
                return True  # already satisfied at level 0
            if v < 0:
                continue     # already false at level 0, drop the literal
            seen.add(lit)
            cl.append(lit)
        if not cl:
            self.ok = False
            return False
        if len(cl) == 1:
            self._assign(cl[0], None)
            return True
        if len(cl) == 2:
            a, b = cl
            self.imp[self.off - a].append(b)
            self.imp[self.off - b].append(a)
            return True
        self.clauses.append(cl)
        self.watches[self.off + cl[0]].append(cl)
        self.watches[self.off + cl[1]].append(cl)
        return True

    def init_order(self):
        # seed activities with normalized occurrence counts so structurally
        # busy variables are decided first
        occ = [0] * (self.nv + 1)
        for cl in self.clauses:
            for lit in cl:
                occ[abs(lit)] += 1
        for lit in range(-self.nv, self.nv + 1):
            if lit:
                for other in self.imp[self.off + lit]:
                    occ[abs(other)] += 1
        top = max(occ) or 1
        for v in range(1, self.nv + 1):
            self.act[v] = occ[v] / top
        self.heap = [(-self.act[v], v) for v in range(1, self.nv + 1)
                     if self.val[self.off + v] == 0]
        heapify(self.heap)

    # ------------------------------------------------------------ core

    def _assign(self, lit, reason):
        self.val[self.off + lit] = 1
        self.val[self.off - lit] = -1
        v = abs(lit)
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self):
        val = self.val
        off = self.off
        trail = self.trail
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.stats.propagations += 1
            # binary implications of p
            for q in self.imp[off + p]:
                vq = val[off + q]
                if vq < 0:
                    return (q, -p)
                if vq == 0:
                    self._assign(q, (q, -p))
            # long clauses watching -p
            wl = self.watches[off - p]
            j = 0
            i = 0
            np = -p
            while i < len(wl):
                cl = wl[i]
                i += 1
                if cl[0] == np:
                    cl[0] = cl[1]
                    cl[1] = np
                l0 = cl[0]
                if val[off + l0] > 0:
                    wl[j] = cl
                    j += 1
                    continue
                moved = False
                for k in range(2, len(cl)):
                    lk = cl[k]
                    if val[off + lk] >= 0:
                        cl[1] = lk
                        cl[k] = np
                        self.watches[off + lk].append(cl)
                        moved = True
                        break
                if moved:
                    continue
                wl[j] = cl
                j += 1
                if val[off + l0] < 0:
                    while i < len(wl):
                        wl[j] = wl[i]
                        j += 1
                        i += 1
                    del wl[j:]
                    return cl
                self._assign(l0, cl)
            del wl[j:]
        return None

    def _bump_var(self, v):
        self.act[v] += self.var_inc
        if self.act[v] > 1e100:
            for u in range(1, self.nv + 1):
                self.act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.act[u], u) for u in range(1, self.nv + 1)
                         if self.val[self.off + u] == 0]
            heapify(self.heap)
        elif self.val[self.off + v] == 0:
            heappush(self.heap, (-self.act[v], v))

    def _analyze(self, confl):
        """First-UIP learning; returns (learnt clause, backjump level)."""
        seen = self.seen
        level = self.level
        trail = self.trail
        learnt = [0]
        to_clear = []
        ctr = 0
        skip = 0
        idx = len(trail)
        cur = len(self.trail_lim)
        while True:
            for q in confl:
                if q == skip:
                    continue
                v = abs(q)
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    to_clear.append(v)
                    self._bump_var(v)
                    if level[v] >= cur:
                        ctr += 1
                    else:
                        learnt.append(q)
            while True:
                idx -= 1
                if seen[abs(trail[idx])]:
                    break
            skip = trail[idx]
            v = abs(skip)
            confl = self.reason[v]
            seen[v] = 0
            ctr -= 1
            if ctr == 0:
                learnt[0] = -skip
                break
        # drop literals implied by the rest of the clause
        kept = [learnt[0]]
        for q in learnt[1:]:
            if not self._redundant(q, to_clear):
                kept.append(q)
        learnt = kept
        for v in to_clear:
            seen[v] = 0
        if len(learnt) == 1:
            return learnt, 0
        # move a literal from the highest remaining level into slot 1
        hi = 1
        for k in range(2, len(learnt)):
            if level[abs(learnt[k])] > level[abs(learnt[hi])]:
                hi = k
        learnt[1], learnt[hi] = learnt[hi], learnt[1]
        return learnt, level[abs(learnt[1])]

    def _redundant(self, q, to_clear):
        # q is redundant when every path from its reason stays inside the
        # already-seen literals; bounded walk, abstaining counts as needed
        seen = self.seen
        stack = [abs(q)]
        mark_from = len(to_clear)
        steps = 0
        while stack:
            steps += 1
            if steps > 400:
                for u in to_clear[mark_from:]:
                    seen[u] = 0
                del to_clear[mark_from:]
                return False
            v = stack.pop()
            r = self.reason[v]
            if r is None:
                for u in to_clear[mark_from:]:
                    seen[u] = 0
                del to_clear[mark_from:]
                return False
            for l in r:
                u = abs(l)
                if u == v or seen[u] or self.level[u] == 0:
                    continue
                seen[u] = 1
                to_clear.append(u)
                stack.append(u)
        return True

    def _cancel_until(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        lim = self.trail_lim[lvl]
        off = self.off
        heap = self.heap
        for i in range(len(self.trail) - 1, lim - 1, -1):
            lit = self.trail[i]
            v = abs(lit)
            self.val[off + lit] = 0
            self.val[off - lit] = 0
            self.phase[v] = 1 if lit > 0 else 0
            self.reason[v] = None
            heappush(heap, (-self.act[v], v))
        del self.trail[lim:]
        del self.trail_lim[lvl:]
        self.qhead = lim

    def _decide(self):
        off = self.off
        while self.heap:
            _, v = heappop(self.heap)
            if self.val[off + v] == 0:
                return v if self.phase[v] else -v
        for v in range(1, self.nv + 1):
            if self.val[off + v] == 0:
                return v if self.phase[v] else -v
        return 0

    def _record(self, learnt, bl):
        self._cancel_until(bl)
        if len(learnt) == 1:
            self._assign(learnt[0], None)
        elif len(learnt) == 2:
            a, b = learnt
            self.imp[self.off - a].append(b)
            self.imp[self.off - b].append(a)
            self._assign(a, (a, b))
        else:
            cl = _LearntClause(learnt)
            cl.act = self.cla_inc
            self.learnts.append(cl)
            self.watches[self.off + cl[0]].append(cl)
            self.watches[self.off + cl[1]].append(cl)
            self._assign(cl[0], cl)
        self.stats.learned += 1

    def _bump_clause(self, cl):
        if isinstance(cl, _LearntClause):
            cl.act += self.cla_inc
            if cl.act > 1e20:
                for other in self.learnts:
                    other.act *= 1e-20
                self.cla_inc *= 1e-20

    def _reduce_db(self):
        locked = set()
        for v in range(1, self.nv + 1):
            r = self.reason[v]
            if isinstance(r, _LearntClause):
                locked.add(id(r))
        by_act = sorted(self.learnts, key=lambda cl: cl.act)
        cut = len(by_act) // 2
        kept = [cl for i, cl in enumerate(by_act)
                if i >= cut or id(cl) in locked or len(cl) <= 3]
        self.learnts = kept
        # rebuild the watch lists positionally; watch slots 0 and 1 are
        # preserved so the two-watch invariant carries over unchanged
        for lst in self.watches:
            lst.clear()
        for cl in self.clauses:
            self.watches[self.off + cl[0]].append(cl)
            self.watches[self.off + cl[1]].append(cl)
        for cl in self.learnts:
            self.watches[self.off + cl[0]].append(cl)
            self.watches[self.off + cl[1]].append(cl)

    def run(self, max_conflicts=None, deadline=None):
        if not self.ok:
            return UNSAT, None
        if self._propagate() is not None:
            return UNSAT, None
        self.init_order()
        max_learnts = max(2000.0, len(self.clauses) / 3)
        restart_idx = 0
        budget = 128 * _luby(restart_idx)
        conflicts_here = 0
        while True:
            confl = self._propagate()
            if confl is not None:
                self.stats.conflicts += 1
                conflicts_here += 1
                if not self.trail_lim:
                    return UNSAT, None
                self._bump_clause(confl)
                learnt, bl = self._analyze(confl)
                self._record(learnt, bl)
                self.var_inc /= 0.95
                self.cla_inc /= 0.999
                if max_conflicts is not None and self.stats.conflicts >= max_conflicts:
                    return UNKNOWN, None
                if deadline is not None and time.monotonic() > deadline:
                    return UNKNOWN, None
                continue
            if len(self.learnts) > max_learnts:
                self._reduce_db()
                self.stats.reductions += 1
                max_learnts *= 1.15
            if conflicts_here >= budget:
                conflicts_here = 0
                restart_idx += 1
                budget = 128 * _luby(restart_idx)
                self.stats.restarts += 1
                self._cancel_until(0)
                continue
            lit = self._decide()
            if lit == 0:
                model = [False] * (self.nv + 1)
                for v in range(1, self.nv + 1):
                    model[v] = self.val[self.off + v] > 0
                return SAT, model
            self.stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._assign(lit, None)


def _unpack_formula(formula):
    if isinstance(formula, CnfFormula):
        return formula.num_vars, formula.clauses
    num_vars, clauses = formula
    return num_vars, clauses


def solve(formula, assumptions=(), *, max_conflicts: Optional[int] = None,
          max_seconds: Optional[float] = None) -> SolveResult:
    """Decide a formula with the embedded solver.

    Assumptions are enforced as level-0 units, so the verdict equals that of
    the formula conjoined with them. Returns UNKNOWN only on budget
    exhaustion. SAT models are re-checked with verify_model before return.
    """
    num_vars, clauses = _unpack_formula(formula)
    assumptions = list(assumptions)
    aset = set(assumptions)
    for lit in assumptions:
        if lit == 0 or abs(lit) > num_vars:
            raise ValueError(f"assumption literal {lit} out of range")
        if -lit in aset:
            raise ValueError(f"assumptions contain both {lit} and {-lit}")
    start = time.monotonic()
    eng = _Cdcl(num_vars)
    for cl in clauses:
        if not eng.add_clause(cl):
            break
    if eng.ok:
        for lit in assumptions:
            if not eng.add_clause([lit]):
                break
    deadline = start + max_seconds if max_seconds is not None else None
    verdict, model = eng.run(max_conflicts=max_conflicts, deadline=deadline)
    eng.stats.wall_time = time.monotonic() - start
    if verdict == SAT:
        if not verify_model((num_vars, clauses), model):
            raise AssertionError("internal error: SAT model failed verification")
        for lit in assumptions:
            if model[abs(lit)] != (lit > 0):
                raise AssertionError("internal error: model violates an assumption")
    return SolveResult(verdict, model, eng.stats)


def verify_model(formula, model) -> bool:
    """True iff the full assignment satisfies every clause; independent of
    any solver internals."""
    num_vars, clauses = _unpack_formula(formula)
    if isinstance(model, dict):
        vals = [None] * (num_vars + 1)
        for v, b in model.items():
            if 1 <= v <= num_vars:
                vals[v] = bool(b)
    else:
        vals = list(model)
    if len(vals) < num_vars + 1 or any(vals[v] is None for v in range(1, num_vars + 1)):
        raise ValueError("model must assign every variable")
    for cl in clauses:
        for lit in cl:
            if vals[lit] if lit > 0 else not vals[-lit]:
                break
        else:
            return False
    return True


def parse_model_literals(text: str):
    """Extract the signed literals of a SAT-competition model ('v' lines or
    bare integer lines), stopping at the 0 terminator."""
    lits = []
    done = False
    for raw in text.splitlines():
        line = raw.strip()
        if done or not line:
            continue
        if line.startswith("v ") or line == "v":
            line = line[1:]
        elif not all(tok.lstrip("-").isdigit() for tok in line.split()):
            continue  # comment, verdict or any other non-model line
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ExternalSolverError(f"unparseable model token {tok!r}") from None
            if lit == 0:
                done = True
                break
            lits.append(lit)
    return lits


def _parse_competition_output(text: str):
    verdict = None
    for raw in text.splitlines():
        line = raw.strip()
        if line == "s SATISFIABLE":
            verdict = SAT
        elif line == "s UNSATISFIABLE":
            verdict = UNSAT
        elif line == "s UNKNOWN":
            verdict = UNKNOWN
    return verdict


def solve_external(dimacs_path: str, solver_cmd: str, timeout: Optional[float] = None) -> SolveResult:
    """Run an external DIMACS solver and parse its verdict.

    solver_cmd is a shell-style template whose '{file}' placeholder receives
    the path. UNSAT verdicts are accepted as reported; SAT verdicts must come
    with a model, which is re-verified against the formula read back from the
    file. Missing verdict lines and timeouts yield UNKNOWN with the captured
    output attached; spawn failures and unusable output raise
    ExternalSolverError instead.
    """
    if "{file}" not in solver_cmd:
        raise ValueError("solver command template must contain '{file}'")
    argv = [tok.replace("{file}", str(dimacs_path)) for tok in shlex.split(solver_cmd)]
    start = time.monotonic()
    try:
        proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
    except subprocess.TimeoutExpired as exc:
        out = (exc.stdout or "")
        if isinstance(out, bytes):
            out = out.decode("utf-8", "replace")
        stats = SolveStats(wall_time=time.monotonic() - start)
        return SolveResult(UNKNOWN, None, stats, output=out)
    except OSError as exc:
        raise ExternalSolverError(f"failed to run {argv[0]!r}: {exc}") from exc
    elapsed = time.monotonic() - start
    output = (proc.stdout or "") + (("\n" + proc.stderr) if proc.stderr else "")
    verdict = _parse_competition_output(proc.stdout or "")
    stats = SolveStats(wall_time=elapsed)
    if verdict is None or verdict == UNKNOWN:
        return SolveResult(UNKNOWN, None, stats, output=output)
    if verdict == UNSAT:
        return SolveResult(UNSAT, None, stats, output=output)
    lits = parse_model_literals(proc.stdout or "")
    if not lits:
        raise ExternalSolverError("solver reported SAT without a model")
    with open(dimacs_path, "r", encoding="utf-8") as fp:
        formula = read_dimacs(fp)
    model = [False] * (formula.num_vars + 1)
    for lit in lits:
        if abs(lit) > formula.num_vars:
            raise ExternalSolverError(f"model literal {lit} out of range")
        model[abs(lit)] = lit > 0
    if not verify_model(formula, model):
        raise ExternalSolverError("solver reported SAT but the model fails verification")
    return SolveResult(SAT, model, stats, output=output)
