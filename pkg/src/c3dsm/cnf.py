"""CNF encodings whose satisfiability answers whether some c3DSM instance of
a given size has no stable matching (variant F), or at most one stable
matching (variant Fprime).

Variable blocks, in this order on the DIMACS surface:

  x block   3 * n * C(n,2) variables. One variable per group (A, B, C),
            agent p and unordered target pair q < r, meaning "p prefers q
            to r"; the opposite preference is the negated literal, so the
            order relation needs no second variable.
  z block   one variable per (matching, candidate triple), in matching
            enumeration order and candidate order. z may be true only if
            the triple blocks the matching.
  y block   (Fprime only) one variable per matching: "this matching may
            stay stable".
  s block   (Fprime only) the sequential at-most-one registers over y.

Clause order is pinned (symmetry units, order clauses, z clauses, one
blocking-witness clause per matching, at-most-one) so identical inputs
produce identical DIMACS bytes.

Literals are nonzero ints in DIMACS convention throughout.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import factorial

from .model import GROUPS, Instance, _inverse, _iter_candidates

VARIANTS = ("F", "Fprime")


class DimacsError(ValueError):
    """Malformed DIMACS input; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class DecodeError(ValueError):
    """A model's x block does not describe total orders."""

    def __init__(self, message: str, role=None, agent=None, triple=None):
        super().__init__(message)
        self.role = role
        self.agent = agent
        self.triple = triple


def _variant_key(variant: str) -> str:
    if variant in ("F", "f"):
        return "F"
    if variant in ("Fprime", "fprime", "F'", "f'"):
        return "Fprime"
    raise ValueError(f"variant must be one of {VARIANTS}, got {variant!r}")


def variant_label(variant: str) -> str:
    """Display form used in DIMACS comment headers: F or F'."""
    return "F" if _variant_key(variant) == "F" else "F'"


@dataclass(frozen=True)
class VarMap:
    """Bijection between DIMACS variable ids and semantic variables."""

    n: int
    with_y: bool = False

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("variable map needs n >= 2")

    @cached_property
    def pairs_per_agent(self) -> int:
        return self.n * (self.n - 1) // 2

    @cached_property
    def num_x(self) -> int:
        return 3 * self.n * self.pairs_per_agent

    @cached_property
    def num_matchings(self) -> int:
        return factorial(self.n) ** 2

    @cached_property
    def triples_per_matching(self) -> int:
        return self.n * (self.n - 1) * (self.n - 2)

    @cached_property
    def num_z(self) -> int:
        return self.num_matchings * self.triples_per_matching

    @cached_property
    def num_y(self) -> int:
        return self.num_matchings if self.with_y else 0

    @cached_property
    def num_s(self) -> int:
        return self.num_matchings - 1 if self.with_y else 0

    @cached_property
    def z_base(self) -> int:
        return self.num_x

    @cached_property
    def y_base(self) -> int:
        return self.num_x + self.num_z

    @cached_property
    def s_base(self) -> int:
        return self.y_base + self.num_y

    @cached_property
    def num_vars(self) -> int:
        return self.num_x + self.num_z + self.num_y + self.num_s

    def _pair_rank(self, q: int, r: int) -> int:
        # lexicographic rank of the pair (q, r), q < r, among all C(n,2) pairs
        return (q - 1) * self.n - q * (q - 1) // 2 + (r - q - 1)

    def x_var(self, group: int, p: int, q: int, r: int) -> int:
        """Variable id for "agent p of group prefers q to r", requires q < r."""
        n = self.n
        if not (0 <= group <= 2 and 1 <= p <= n and 1 <= q < r <= n):
            raise ValueError(f"bad x index (group={group}, p={p}, q={q}, r={r})")
        return (group * n + (p - 1)) * self.pairs_per_agent + self._pair_rank(q, r) + 1

    def x_lit(self, group: int, p: int, q: int, r: int) -> int:
        """Signed literal for "p prefers q to r" for any distinct q, r."""
        if q < r:
            return self.x_var(group, p, q, r)
        return -self.x_var(group, p, r, q)

    @cached_property
    def _x_table(self):
        # _x_table[group][p][q][r] = signed literal, 0 on the diagonal
        n = self.n
        tbl = [[[[0] * (n + 1) for _ in range(n + 1)] for _ in range(n + 1)]
               for _ in range(3)]
        for g in range(3):
            for p in range(1, n + 1):
                for q in range(1, n + 1):
                    for r in range(q + 1, n + 1):
                        vid = self.x_var(g, p, q, r)
                        tbl[g][p][q][r] = vid
                        tbl[g][p][r][q] = -vid
        return tbl

    def z_var(self, m_idx: int, t_idx: int) -> int:
        """Variable id for candidate t_idx of matching m_idx (both 0-based)."""
        if not (0 <= m_idx < self.num_matchings and 0 <= t_idx < self.triples_per_matching):
            raise ValueError(f"bad z index (matching={m_idx}, triple={t_idx})")
        return self.z_base + m_idx * self.triples_per_matching + t_idx + 1

    def y_var(self, m_idx: int) -> int:
        if not (self.with_y and 0 <= m_idx < self.num_matchings):
            raise ValueError(f"bad y index {m_idx}")
        return self.y_base + m_idx + 1

    def s_var(self, i: int) -> int:
        """Sequential register s_i, 1-based (i = 1 .. num_matchings - 1)."""
        if not (self.with_y and 1 <= i <= self.num_s):
            raise ValueError(f"bad s index {i}")
        return self.s_base + i


@dataclass
class CnfFormula:
    """A CNF formula: clause list over integer literals plus the var count."""

    num_vars: int
    clauses: list

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValueError("num_vars must be nonnegative")
        self.clauses = [list(cl) for cl in self.clauses]
        for i, cl in enumerate(self.clauses):
            if not cl:
                raise ValueError(f"clause {i} is empty")
            lits = set()
            for lit in cl:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {i} has literal {lit} out of range")
                lits.add(lit)
            if any(-lit in lits for lit in lits):
                raise ValueError(f"clause {i} contains a literal and its negation")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


@dataclass(frozen=True)
class FormulaStats:
    """Closed-form block sizes of one formula build."""

    n: int
    variant: str
    num_x: int
    num_z: int
    num_y: int
    num_s: int
    num_unit: int
    num_ord: int
    num_z_clauses: int
    num_stab: int
    num_amo: int
    num_vars: int
    num_clauses: int

    def __post_init__(self):
        assert self.num_vars == self.num_x + self.num_z + self.num_y + self.num_s
        assert self.num_clauses == (self.num_unit + self.num_ord + self.num_z_clauses
                                    + self.num_stab + self.num_amo)
        assert self.num_z_clauses == 3 * self.num_z

    def lines(self):
        out = [f"n: {self.n}", f"variant: {variant_label(self.variant)}"]
        for k in ("num_x", "num_z", "num_y", "num_s", "num_unit", "num_ord",
                  "num_z_clauses", "num_stab", "num_amo", "num_vars", "num_clauses"):
            out.append(f"{k}: {getattr(self, k)}")
        return out


def predict_sizes(n: int, variant: str = "F", include_c1_clause: bool = True,
                  symmetry: bool = True) -> FormulaStats:
    """Closed-form variable and clause counts, no formula materialization."""
    if n < 3:
        raise ValueError("formula sizes are defined for n >= 3")
    variant = _variant_key(variant)
    with_y = variant == "Fprime"
    pairs = n * (n - 1) // 2
    nm = factorial(n) ** 2
    tpm = n * (n - 1) * (n - 2)
    num_x = 3 * n * pairs
    num_z = nm * tpm
    num_y = nm if with_y else 0
    num_s = nm - 1 if with_y else 0
    num_unit = 0
    if symmetry:
        num_unit = 2 * pairs + (n - 1) * (n - 2) // 2 + (1 if include_c1_clause else 0)
    num_ord = 3 * n * tpm
    num_zc = 3 * num_z
    num_stab = nm
    num_amo = 3 * nm - 4 if with_y else 0
    return FormulaStats(
        n=n, variant=variant, num_x=num_x, num_z=num_z, num_y=num_y, num_s=num_s,
        num_unit=num_unit, num_ord=num_ord, num_z_clauses=num_zc, num_stab=num_stab,
        num_amo=num_amo, num_vars=num_x + num_z + num_y + num_s,
        num_clauses=num_unit + num_ord + num_zc + num_stab + num_amo)


def encode_symmetry_units(n: int, include_c1_clause: bool):
    """Unit clauses fixing a_1's row, b_1's row and most of c_1's row.

    The extra unit placing a_2 ahead of a_1 in c_1's row is sound only when
    every smaller instance is known to admit a stable matching, so it is the
    caller's decision.
    """
    if n < 2:
        raise ValueError("symmetry units need n >= 2")
    vm = VarMap(n)
    units = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            units.append([vm.x_var(0, 1, i, j)])
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            units.append([vm.x_var(1, 1, i, j)])
    if include_c1_clause:
        units.append([vm.x_lit(2, 1, 2, 1)])
    for i in range(2, n + 1):
        for j in range(i + 1, n + 1):
            units.append([vm.x_var(2, 1, i, j)])
    return units


def encode_order_clauses(n: int):
    """Transitivity clauses making every agent's x block a total order."""
    vm = VarMap(n)
    tbl = vm._x_table
    clauses = []
    rng = range(1, n + 1)
    for g in range(3):
        for p in rng:
            t = tbl[g][p]
            for q in rng:
                for r in rng:
                    if r == q:
                        continue
                    for s in rng:
                        if s == q or s == r:
                            continue
                        clauses.append([-t[q][r], -t[r][s], t[q][s]])
    return clauses


def _iter_matchings_raw(n: int):
    """(sigma, tau, mc) per matching, in enumeration order, no objects."""
    rng = range(1, n + 1)
    for sigma in itertools.permutations(rng):
        inv_s = _inverse(sigma)
        for tau in itertools.permutations(rng):
            inv_t = _inverse(tau)
            mc = tuple(inv_s[inv_t[k - 1] - 1] for k in rng)
            yield sigma, tau, mc


def _iter_z_clauses(vm: VarMap):
    # Three binary clauses per z: z implies each blocking condition of its
    # triple. The third compares a against c's partner M(c).
    n = vm.n
    xa, xb, xc = vm._x_table
    z = vm.z_base
    rng = range(1, n + 1)
    for sigma, tau, mc in _iter_matchings_raw(n):
        for a in rng:
            ma = sigma[a - 1]
            xa_p = xa[a]
            for b in rng:
                if b == ma:
                    continue
                lit_a = xa_p[b][ma]
                mb = tau[b - 1]
                xb_p = xb[b]
                for c in rng:
                    if c == mb:
                        continue
                    mcv = mc[c - 1]
                    if mcv == a:
                        continue
                    z += 1
                    yield [-z, lit_a]
                    yield [-z, xb_p[c][mb]]
                    yield [-z, xc[c][a][mcv]]


def encode_z_clauses(n: int):
    """All z-implication clauses, in matching then candidate order."""
    if n < 3:
        raise ValueError("z clauses need n >= 3")
    return list(_iter_z_clauses(VarMap(n)))


def _iter_stab_clauses(vm: VarMap, with_y: bool):
    tpm = vm.triples_per_matching
    z = vm.z_base
    for m_idx in range(vm.num_matchings):
        zs = list(range(z + 1, z + tpm + 1))
        z += tpm
        if with_y:
            yield [vm.y_var(m_idx)] + zs
        else:
            yield zs


def encode_stab_clauses(n: int, with_y: bool = False):
    """One clause per matching demanding a blocking witness (or its y)."""
    if n < 3:
        raise ValueError("blocking-witness clauses need n >= 3")
    return list(_iter_stab_clauses(VarMap(n, with_y=with_y), with_y))


def encode_amo_sequential(y_ids, s_base: int = None):
    """Sequential at-most-one over y_ids with fresh register variables.

    Registers s_1..s_{m-1} get ids s_base.. (default: right after max(y_ids)).
    Returns (clauses, number of new variables); 3m - 4 clauses for m >= 2,
    nothing for m < 2.
    """
    y = list(y_ids)
    m = len(y)
    if m < 2:
        return [], 0
    if s_base is None:
        s_base = max(y) + 1
    s = lambda i: s_base + i - 1
    clauses = [[-y[0], s(1)]]
    for i in range(2, m):
        clauses.append([-y[i - 1], s(i)])
        clauses.append([-s(i - 1), s(i)])
        clauses.append([-y[i - 1], -s(i - 1)])
    clauses.append([-y[m - 1], -s(m - 1)])
    return clauses, m - 1


def iter_formula_clauses(n: int, variant: str = "F", include_c1_clause: bool = True,
                         symmetry: bool = True):
    """All clauses of the chosen variant in the pinned emission order."""
    if n < 3:
        raise ValueError("formula construction needs n >= 3")
    variant = _variant_key(variant)
    with_y = variant == "Fprime"
    vm = VarMap(n, with_y=with_y)
    if symmetry:
        yield from encode_symmetry_units(n, include_c1_clause)
    yield from encode_order_clauses(n)
    yield from _iter_z_clauses(vm)
    yield from _iter_stab_clauses(vm, with_y)
    if with_y:
        y_ids = [vm.y_var(i) for i in range(vm.num_matchings)]
        clauses, _ = encode_amo_sequential(y_ids, s_base=vm.s_base + 1)
        yield from clauses


def _build(n, variant, include_c1_clause, symmetry):
    stats = predict_sizes(n, variant, include_c1_clause, symmetry)
    clauses = list(iter_formula_clauses(n, variant, include_c1_clause, symmetry))
    if len(clauses) != stats.num_clauses:
        raise AssertionError(
            f"emitted {len(clauses)} clauses, predicted {stats.num_clauses}")
    return CnfFormula(stats.num_vars, clauses)


def build_f(n: int, include_c1_clause: bool = True, *, symmetry: bool = True) -> CnfFormula:
    """Variant F in memory: satisfiable iff some instance of size n has no
    stable matching (given the symmetry normalization)."""
    return _build(n, "F", include_c1_clause, symmetry)


def build_f_prime(n: int, include_c1_clause: bool = True, *, symmetry: bool = True) -> CnfFormula:
    """Variant Fprime in memory: satisfiable iff some instance of size n has
    at most one stable matching (given the symmetry normalization)."""
    return _build(n, "Fprime", include_c1_clause, symmetry)


def write_dimacs(formula: CnfFormula, fp, comments=()):
    """Write DIMACS CNF; byte-deterministic, LF line endings."""
    for line in comments:
        fp.write(f"c {line}\n")
    fp.write(f"p cnf {formula.num_vars} {len(formula.clauses)}\n")
    buf = []
    for cl in formula.clauses:
        buf.append(" ".join(map(str, cl)) + " 0")
        if len(buf) >= 65536:
            fp.write("\n".join(buf) + "\n")
            buf.clear()
    if buf:
        fp.write("\n".join(buf) + "\n")


def stream_dimacs(fp, n: int, variant: str = "F", include_c1_clause: bool = True,
                  symmetry: bool = True) -> FormulaStats:
    """Stream a full formula to fp without materializing it.

    The header comment and p-line come from the closed-form sizes; emission
    is cross-checked against them.
    """
    stats = predict_sizes(n, variant, include_c1_clause, symmetry)
    fp.write(f"c c3dsm n={n} variant={variant_label(variant)} "
             f"sym={'on' if symmetry else 'off'}\n")
    fp.write(f"p cnf {stats.num_vars} {stats.num_clauses}\n")
    buf = []
    count = 0
    for cl in iter_formula_clauses(n, variant, include_c1_clause, symmetry):
        buf.append(" ".join(map(str, cl)) + " 0")
        count += 1
        if len(buf) >= 65536:
            fp.write("\n".join(buf) + "\n")
            buf.clear()
    if buf:
        fp.write("\n".join(buf) + "\n")
    if count != stats.num_clauses:
        raise AssertionError(f"emitted {count} clauses, predicted {stats.num_clauses}")
    return stats


def read_dimacs(fp) -> CnfFormula:
    """Strict DIMACS reader: comments allowed, one zero-terminated clause per
    line, counts must match the header."""
    num_vars = None
    declared = None
    clauses = []
    for line_no, raw in enumerate(fp, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError("duplicate header", line_no)
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise DimacsError("malformed header, expected 'p cnf <vars> <clauses>'", line_no)
            try:
                num_vars, declared = int(parts[2]), int(parts[3])
            except ValueError:
                raise DimacsError("header counts must be integers", line_no) from None
            if num_vars < 0 or declared < 0:
                raise DimacsError("header counts must be nonnegative", line_no)
            continue
        if num_vars is None:
            raise DimacsError("clause before header", line_no)
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise DimacsError("clause must contain integers", line_no) from None
        if not lits or lits[-1] != 0:
            raise DimacsError("clause line must end with 0", line_no)
        cl = lits[:-1]
        if 0 in cl:
            raise DimacsError("literal 0 inside clause", line_no)
        if not cl:
            raise DimacsError("empty clause", line_no)
        for lit in cl:
            if abs(lit) > num_vars:
                raise DimacsError(f"literal {lit} out of range 1..{num_vars}", line_no)
        clauses.append(cl)
    if num_vars is None:
        raise DimacsError("missing header", 1)
    if len(clauses) != declared:
        raise DimacsError(f"header declares {declared} clauses, found {len(clauses)}",
                          line_no)
    return CnfFormula(num_vars, clauses)


def write_varmap(fp, n: int, variant: str = "F"):
    """Write the sidecar mapping every variable id to its meaning.

    Line formats: 'x <id> <group> <p> <q> <r>' (q < r, id means p prefers q
    to r), 'z <id> <matching> <a> <b> <c>', 'y <id> <matching>' and
    's <id> <i>'; matching indices are 1-based enumeration positions.
    """
    variant = _variant_key(variant)
    vm = VarMap(n, with_y=variant == "Fprime")
    buf = []
    for g_idx, g in enumerate(GROUPS):
        for p in range(1, n + 1):
            for q in range(1, n + 1):
                for r in range(q + 1, n + 1):
                    buf.append(f"x {vm.x_var(g_idx, p, q, r)} {g} {p} {q} {r}")
    fp.write("\n".join(buf) + "\n")
    buf.clear()
    z = vm.z_base
    for m_idx, (sigma, tau, mc) in enumerate(_iter_matchings_raw(n), start=1):
        for a, b, c in _iter_candidates(sigma, tau, mc):
            z += 1
            buf.append(f"z {z} {m_idx} {a} {b} {c}")
        if len(buf) >= 65536:
            fp.write("\n".join(buf) + "\n")
            buf.clear()
    if buf:
        fp.write("\n".join(buf) + "\n")
        buf.clear()
    if vm.with_y:
        for m_idx in range(vm.num_matchings):
            buf.append(f"y {vm.y_var(m_idx)} {m_idx + 1}")
        for i in range(1, vm.num_s + 1):
            buf.append(f"s {vm.s_var(i)} {i}")
        fp.write("\n".join(buf) + "\n")


def read_varmap(fp) -> VarMap:
    """Read a sidecar back into a VarMap, verifying the x block layout."""
    x_lines = {}
    has_y = False
    max_p = 0
    for line_no, raw in enumerate(fp, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "x":
            if len(parts) != 6 or parts[2] not in GROUPS:
                raise DimacsError("malformed x line in variable map", line_no)
            vid = int(parts[1])
            g = GROUPS.index(parts[2])
            p, q, r = int(parts[3]), int(parts[4]), int(parts[5])
            x_lines[vid] = (g, p, q, r)
            max_p = max(max_p, p, q, r)
        elif kind == "y":
            has_y = True
        elif kind in ("z", "s"):
            continue
        else:
            raise DimacsError(f"unknown variable kind {kind!r}", line_no)
    n = max_p
    if n < 2:
        raise DimacsError("variable map has no usable x lines", 1)
    vm = VarMap(n, with_y=has_y)
    if len(x_lines) != vm.num_x:
        raise DimacsError(f"expected {vm.num_x} x lines for n={n}, found {len(x_lines)}", 1)
    for vid, (g, p, q, r) in x_lines.items():
        if not (1 <= q < r <= n) or vm.x_var(g, p, q, r) != vid:
            raise DimacsError(f"x line for id {vid} does not match the canonical layout", 1)
    return vm


def _model_lookup(model, num_vars: int):
    if isinstance(model, dict):
        def get(v):
            try:
                return bool(model[v])
            except KeyError:
                raise ValueError(f"model does not assign variable {v}") from None
        return get
    seq = model

    def get(v):
        if v >= len(seq) or seq[v] is None:
            raise ValueError(f"model does not assign variable {v}")
        return bool(seq[v])

    return get


def decode_model(vm: VarMap, model) -> Instance:
    """Rebuild the instance described by a model's x block.

    The x assignment must induce a total order per agent; a cyclic triple
    raises DecodeError naming the first violation found.
    """
    n = vm.n
    get = _model_lookup(model, vm.num_vars)
    tbl = vm._x_table

    def rel(g, p, q, r):
        lit = tbl[g][p][q][r]
        return get(lit) if lit > 0 else not get(-lit)

    tables = []
    for g, role in enumerate(GROUPS):
        rows = []
        for p in range(1, n + 1):
            wins = [0] * (n + 1)
            for q in range(1, n + 1):
                for r in range(q + 1, n + 1):
                    if rel(g, p, q, r):
                        wins[q] += 1
                    else:
                        wins[r] += 1
            # a tournament is a total order exactly when its score sequence
            # is 0..n-1; otherwise a 3-cycle exists
            if sorted(wins[1:]) != list(range(n)):
                for q, r, s in itertools.permutations(range(1, n + 1), 3):
                    if rel(g, p, q, r) and rel(g, p, r, s) and rel(g, p, s, q):
                        raise DecodeError(
                            f"x assignment for {role} {p} is cyclic on "
                            f"({q}, {r}, {s})", role=role, agent=p, triple=(q, r, s))
                raise DecodeError(f"x assignment for {role} {p} is not a total order",
                                  role=role, agent=p)
            rows.append(tuple(sorted(range(1, n + 1), key=lambda q: -wins[q])))
        tables.append(tuple(rows))
    return Instance(n, *tables)


def instance_assumptions(vm: VarMap, inst: Instance):
    """One signed literal per x variable matching the instance's preferences."""
    if vm.n != inst.n:
        raise ValueError("variable map and instance sizes differ")
    n = vm.n
    lits = []
    for g, table in enumerate(inst.ranks):
        for p in range(1, n + 1):
            pos = table[p]
            for q in range(1, n + 1):
                for r in range(q + 1, n + 1):
                    vid = vm.x_var(g, p, q, r)
                    lits.append(vid if pos[q] < pos[r] else -vid)
    return lits


@lru_cache(maxsize=None)
def matching_block_tables(n: int, _c_conjunct_uses_b_partner: bool = False):
    """Per matching, per candidate triple: the three x literals that license
    its z variable. Read-only (shared via cache).

    The keyword is a sensitivity hook for the oracle cross-check and is never
    used on release paths: when set, the third conjunct compares c's ranking
    of a against the agent indexed by a's B-partner instead of c's A-partner.
    When those indices collide no comparison variable exists and the mutated
    conjunct is recorded as vacuously satisfied (literal 0); the strict
    reading (vacuously violated) would leave every matching whose sigma
    fixes some point unblockable and the hook without any effect.
    """
    vm = VarMap(n)
    xa, xb, xc = vm._x_table
    rng = range(1, n + 1)
    tables = []
    for sigma, tau, mc in _iter_matchings_raw(n):
        cands = []
        for a in rng:
            ma = sigma[a - 1]
            for b in rng:
                if b == ma:
                    continue
                mb = tau[b - 1]
                for c in rng:
                    if c == mb or mc[c - 1] == a:
                        continue
                    if _c_conjunct_uses_b_partner:
                        third = 0 if ma == a else xc[c][a][ma]
                    else:
                        third = xc[c][a][mc[c - 1]]
                    cands.append((xa[a][b][ma], xb[b][c][mb], third))
        tables.append(tuple(cands))
    return tuple(tables)


def evaluate_no_stable(inst: Instance, *, _c_conjunct_uses_b_partner: bool = False) -> bool:
    """Solver-free evaluation of the formula's matching part under inst's x.

    Fixes the x block from the instance, gives every z its greedy value (true
    exactly when all three licensing literals hold) and reports whether every
    matching's blocking-witness clause is then satisfied, i.e. whether the
    formula claims the instance has no stable matching.
    """
    vm = VarMap(inst.n)
    xval = bytearray(vm.num_x + 1)
    for lit in instance_assumptions(vm, inst):
        if lit > 0:
            xval[lit] = 1
    tables = matching_block_tables(inst.n, _c_conjunct_uses_b_partner)
    for cands in tables:
        for l1, l2, l3 in cands:
            if ((xval[l1] if l1 > 0 else not xval[-l1])
                    and (xval[l2] if l2 > 0 else not xval[-l2])
                    and (l3 == 0 or (xval[l3] if l3 > 0 else not xval[-l3]))):
                break
        else:
            return False
    return True
