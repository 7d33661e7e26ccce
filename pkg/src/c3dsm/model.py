"""Core model for the three-dimensional stable matching problem with cyclic
preferences (c3DSM).

Three equal-size agent groups A, B and C: every a in A ranks all of B, every
b in B ranks all of C, every c in C ranks all of A. A matching is a set of n
disjoint triples (a, b, c) covering every agent exactly once; a triple blocks
a matching when each of its members strictly prefers it to their assigned
partner, and a matching with no blocking triple is stable.

Agent indices are 1-based on the whole public surface. All operations are
pure; values are immutable and safe to share across threads.
"""

import itertools
import random
import re
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, NamedTuple, Optional

GROUPS = ("A", "B", "C")

# Exhaustive-search guards; callers may override explicitly but never silently.
STABLE_SEARCH_MAX_N = 5
CANONICAL_MAX_N = 3


class CapacityError(ValueError):
    """An exhaustive enumeration was requested above its size guard."""


class ParseError(ValueError):
    """Malformed instance text; carries the offending line number."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class Triple(NamedTuple):
    a: int
    b: int
    c: int


def _group_index(role: str) -> int:
    try:
        return GROUPS.index(role)
    except ValueError:
        raise ValueError(f"role must be one of {GROUPS}, got {role!r}") from None


def _is_perm(row, n: int) -> bool:
    return len(row) == n and sorted(row) == list(range(1, n + 1))


def _inverse(perm):
    inv = [0] * len(perm)
    for i, v in enumerate(perm, start=1):
        inv[v - 1] = i
    return tuple(inv)


@dataclass(frozen=True)
class Instance:
    """Preference tables of one c3DSM instance.

    pref_a[i-1] is a_i's ranking of B (most preferred first), pref_b[j-1] is
    b_j's ranking of C, pref_c[k-1] is c_k's ranking of A. Every row is a
    permutation of 1..n.
    """

    n: int
    pref_a: tuple
    pref_b: tuple
    pref_c: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("group size must be at least 1")
        for name, table in (("A", self.pref_a), ("B", self.pref_b), ("C", self.pref_c)):
            table = tuple(tuple(row) for row in table)
            object.__setattr__(self, {"A": "pref_a", "B": "pref_b", "C": "pref_c"}[name], table)
            if len(table) != self.n:
                raise ValueError(f"table {name} must have exactly {self.n} rows")
            for i, row in enumerate(table, start=1):
                if not _is_perm(row, self.n):
                    raise ValueError(f"row {name} {i} is not a permutation of 1..{self.n}")

    @cached_property
    def ranks(self):
        """Per group, rank[p][q] = position of q in agent p's row (0 = top)."""

        def table(rows):
            out = [None] * (self.n + 1)
            for p, row in enumerate(rows, start=1):
                pos = [0] * (self.n + 1)
                for k, q in enumerate(row):
                    pos[q] = k
                out[p] = pos
            return out

        return table(self.pref_a), table(self.pref_b), table(self.pref_c)

    def row(self, role: str, p: int):
        if not 1 <= p <= self.n:
            raise ValueError(f"agent index {p} out of range 1..{self.n}")
        return (self.pref_a, self.pref_b, self.pref_c)[_group_index(role)][p - 1]


@dataclass(frozen=True)
class Matching:
    """A matching as a pair of permutations.

    sigma[i-1] = j pairs a_i with b_j; tau[j-1] = k pairs b_j with c_k. The
    induced triples are (a_i, b_sigma(i), c_tau(sigma(i))), so c_k's partner
    in A is a_{sigma^-1(tau^-1(k))}.
    """

    sigma: tuple
    tau: tuple

    def __post_init__(self):
        object.__setattr__(self, "sigma", tuple(self.sigma))
        object.__setattr__(self, "tau", tuple(self.tau))
        n = len(self.sigma)
        if not (_is_perm(self.sigma, n) and _is_perm(self.tau, n)):
            raise ValueError("sigma and tau must be permutations of 1..n")
        if len(self.tau) != n:
            raise ValueError("sigma and tau must have equal length")

    @property
    def n(self) -> int:
        return len(self.sigma)

    @cached_property
    def _inv_sigma(self):
        return _inverse(self.sigma)

    @cached_property
    def _inv_tau(self):
        return _inverse(self.tau)

    def b_of(self, a: int) -> int:
        return self.sigma[a - 1]

    def c_of(self, b: int) -> int:
        return self.tau[b - 1]

    def a_of(self, c: int) -> int:
        return self._inv_sigma[self._inv_tau[c - 1] - 1]

    def triples(self):
        return [Triple(a, self.sigma[a - 1], self.tau[self.sigma[a - 1] - 1])
                for a in range(1, self.n + 1)]


def prefers(inst: Instance, role: str, p: int, q: int, r: int) -> bool:
    """True iff agent p of the given group ranks q strictly ahead of r."""
    if q == r:
        raise ValueError("compared agents q and r must differ")
    for v in (p, q, r):
        if not 1 <= v <= inst.n:
            raise ValueError(f"agent index {v} out of range 1..{inst.n}")
    table = inst.ranks[_group_index(role)]
    return table[p][q] < table[p][r]


def is_blocking(inst: Instance, m: Matching, t: Triple) -> bool:
    """True iff t = (a, b, c) blocks m: b >_a M(a), c >_b M(b), a >_c M(c).

    Strict comparison makes any triple sharing a matched pair with m in the
    relevant direction non-blocking automatically.
    """
    a, b, c = t
    for v in (a, b, c):
        if not 1 <= v <= inst.n:
            raise ValueError(f"agent index {v} out of range 1..{inst.n}")
    if m.n != inst.n:
        raise ValueError("matching size does not match instance size")
    ra, rb, rc = inst.ranks
    return (ra[a][b] < ra[a][m.b_of(a)]
            and rb[b][c] < rb[b][m.c_of(b)]
            and rc[c][a] < rc[c][m.a_of(c)])


def _iter_candidates(sigma, tau, mc=None):
    n = len(sigma)
    if mc is None:
        inv_s = _inverse(sigma)
        inv_t = _inverse(tau)
        mc = tuple(inv_s[inv_t[k - 1] - 1] for k in range(1, n + 1))
    rng = range(1, n + 1)
    for a in rng:
        ma = sigma[a - 1]
        for b in rng:
            if b == ma:
                continue
            mb = tau[b - 1]
            for c in rng:
                if c == mb or mc[c - 1] == a:
                    continue
                yield Triple(a, b, c)


@lru_cache(maxsize=None)
def _candidates_cached(sigma, tau):
    return tuple(_iter_candidates(sigma, tau))


def candidate_triples(m: Matching, n: int):
    """All potential blocking triples of m in lexicographic (a, b, c) order.

    These are the triples sharing no matched pair with m in the relevant
    direction; there are exactly n(n-1)(n-2) of them.
    """
    if m.n != n:
        raise ValueError("matching size does not match n")
    if n <= 4:
        return list(_candidates_cached(m.sigma, m.tau))
    return list(_iter_candidates(m.sigma, m.tau))


def is_stable(inst: Instance, m: Matching) -> bool:
    """True iff no triple blocks m. Only candidate triples need scanning."""
    ra, rb, rc = inst.ranks
    sigma, tau = m.sigma, m.tau
    mc = tuple(m.a_of(k) for k in range(1, inst.n + 1))
    for a, b, c in _iter_candidates(sigma, tau, mc):
        if (ra[a][b] < ra[a][sigma[a - 1]]
                and rb[b][c] < rb[b][tau[b - 1]]
                and rc[c][a] < rc[c][mc[c - 1]]):
            return False
    return True


def enumerate_matchings(n: int) -> Iterator[Matching]:
    """All (n!)^2 matchings, lexicographic by (sigma, tau) in one-line form."""
    if n < 1:
        raise ValueError("group size must be at least 1")
    rng = range(1, n + 1)
    for sigma in itertools.permutations(rng):
        for tau in itertools.permutations(rng):
            yield Matching(sigma, tau)


def _iter_scan_data(n):
    # Raw per-matching data for the hot stability scans: no Matching objects.
    rng = range(1, n + 1)
    for sigma in itertools.permutations(rng):
        inv_s = _inverse(sigma)
        for tau in itertools.permutations(rng):
            inv_t = _inverse(tau)
            mc = tuple(inv_s[inv_t[k - 1] - 1] for k in rng)
            yield sigma, tau, mc, tuple(_iter_candidates(sigma, tau, mc))


@lru_cache(maxsize=None)
def _scan_data_cached(n):
    return tuple(_iter_scan_data(n))


def _scan_data(n):
    return _scan_data_cached(n) if n <= 4 else _iter_scan_data(n)


def _guard_search(n, max_n):
    if n > max_n:
        raise CapacityError(
            f"exhaustive stability search is guarded at n <= {max_n} (got n={n}); "
            "pass max_n explicitly to override")


def count_stable_matchings(inst: Instance, *, stop_after: Optional[int] = None,
                           max_n: int = STABLE_SEARCH_MAX_N) -> int:
    """Number of stable matchings, optionally stopping early at stop_after."""
    _guard_search(inst.n, max_n)
    ra, rb, rc = inst.ranks
    count = 0
    for sigma, tau, mc, cands in _scan_data(inst.n):
        for a, b, c in cands:
            if (ra[a][b] < ra[a][sigma[a - 1]]
                    and rb[b][c] < rb[b][tau[b - 1]]
                    and rc[c][a] < rc[c][mc[c - 1]]):
                break
        else:
            count += 1
            if stop_after is not None and count >= stop_after:
                return count
    return count


def stable_matchings(inst: Instance, *, max_n: int = STABLE_SEARCH_MAX_N):
    """All stable matchings of inst in enumeration order (exhaustive scan)."""
    _guard_search(inst.n, max_n)
    ra, rb, rc = inst.ranks
    out = []
    for sigma, tau, mc, cands in _scan_data(inst.n):
        for a, b, c in cands:
            if (ra[a][b] < ra[a][sigma[a - 1]]
                    and rb[b][c] < rb[b][tau[b - 1]]
                    and rc[c][a] < rc[c][mc[c - 1]]):
                break
        else:
            out.append(Matching(sigma, tau))
    return out


def mutual_top_triple(inst: Instance) -> Optional[Triple]:
    """Some (a, b, c) where b is a's top, c is b's top and a is c's top.

    Returns the triple with the smallest a if one exists, else None. For each
    a the candidate pair (b, c) is forced, so scanning a = 1..n is exhaustive.
    """
    for a in range(1, inst.n + 1):
        b = inst.pref_a[a - 1][0]
        c = inst.pref_b[b - 1][0]
        if inst.pref_c[c - 1][0] == a:
            return Triple(a, b, c)
    return None


def reduce_by_triple(inst: Instance, t: Triple) -> Instance:
    """Delete a mutual top triple and compress indices, preserving orders."""
    a0, b0, c0 = t
    if (inst.pref_a[a0 - 1][0] != b0 or inst.pref_b[b0 - 1][0] != c0
            or inst.pref_c[c0 - 1][0] != a0):
        raise ValueError(f"triple {tuple(t)} is not a mutual top triple")
    if inst.n < 2:
        raise ValueError("cannot reduce an instance of size 1")

    def new_index(gone):
        idx = [0] * (inst.n + 1)
        k = 0
        for v in range(1, inst.n + 1):
            if v != gone:
                k += 1
                idx[v] = k
        return idx

    na, nb, nc = new_index(a0), new_index(b0), new_index(c0)

    def shrink(table, gone_agent, target_index, gone_target):
        rows = []
        for p, row in enumerate(table, start=1):
            if p == gone_agent:
                continue
            rows.append(tuple(target_index[v] for v in row if v != gone_target))
        return tuple(rows)

    return Instance(inst.n - 1,
                    shrink(inst.pref_a, a0, nb, b0),
                    shrink(inst.pref_b, b0, nc, c0),
                    shrink(inst.pref_c, c0, na, a0))


def extend_matching(reduced: Matching, t: Triple) -> Matching:
    """Lift a matching of the reduced instance back and add the triple t."""
    n = reduced.n + 1
    a0, b0, c0 = t
    for v in (a0, b0, c0):
        if not 1 <= v <= n:
            raise ValueError(f"agent index {v} out of range 1..{n}")
    orig_a = [i for i in range(1, n + 1) if i != a0]
    orig_b = [j for j in range(1, n + 1) if j != b0]
    orig_c = [k for k in range(1, n + 1) if k != c0]
    sigma = [0] * n
    tau = [0] * n
    sigma[a0 - 1] = b0
    tau[b0 - 1] = c0
    for i, a in enumerate(orig_a):
        sigma[a - 1] = orig_b[reduced.sigma[i] - 1]
    for j, b in enumerate(orig_b):
        tau[b - 1] = orig_c[reduced.tau[j] - 1]
    return Matching(tuple(sigma), tuple(tau))


def relabel(inst: Instance, pa, pb, pc) -> Instance:
    """Relabel agents; p*[old-1] is the new index of old agent `old`."""
    n = inst.n
    for name, p in (("pa", pa), ("pb", pb), ("pc", pc)):
        if not _is_perm(tuple(p), n):
            raise ValueError(f"{name} must be a permutation of 1..{n}")

    def remap(table, row_perm, target_perm):
        rows = [None] * n
        for old, row in enumerate(table, start=1):
            rows[row_perm[old - 1] - 1] = tuple(target_perm[v - 1] for v in row)
        return tuple(rows)

    return Instance(n,
                    remap(inst.pref_a, pa, pb),
                    remap(inst.pref_b, pb, pc),
                    remap(inst.pref_c, pc, pa))


def canonicalize(inst: Instance) -> Instance:
    """Relabel so a_1's row is 1..n, b_1's row is 1..n, and c_1 ranks the
    agents a_2..a_n in increasing index order (a_1 wherever c_1 puts it).

    Relabeling preserves the set of stable matchings up to the same renaming,
    in particular their count.
    """
    n = inst.n
    pb = [0] * n
    for pos, b in enumerate(inst.pref_a[0], start=1):
        pb[b - 1] = pos
    old_b1 = inst.pref_a[0][0]
    pc = [0] * n
    for pos, c in enumerate(inst.pref_b[old_b1 - 1], start=1):
        pc[c - 1] = pos
    old_c1 = inst.pref_b[old_b1 - 1][0]
    pa = [0] * n
    pa[0] = 1
    nxt = 2
    for a in inst.pref_c[old_c1 - 1]:
        if a != 1:
            pa[a - 1] = nxt
            nxt += 1
    return relabel(inst, tuple(pa), tuple(pb), tuple(pc))


def parse_instance(text) -> Instance:
    """Parse the plain-text instance format (see serialize_instance)."""
    if isinstance(text, (bytes, bytearray)):
        text = bytes(text).decode("utf-8")
    n = None
    expected = []
    rows = []
    line_no = 0
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            m = re.fullmatch(r"c3dsm n=(\d+)", line)
            if not m:
                raise ParseError("expected header 'c3dsm n=<n>'", line_no)
            n = int(m.group(1))
            if n < 1:
                raise ParseError("group size must be at least 1", line_no)
            expected = [(g, i) for g in GROUPS for i in range(1, n + 1)]
            continue
        if not expected:
            raise ParseError("unexpected content after the last preference row", line_no)
        g, i = expected.pop(0)
        head, sep, tail = line.partition(":")
        if not sep:
            raise ParseError("missing ':' in preference row", line_no)
        label = head.split()
        if label != [g, str(i)]:
            raise ParseError(f"expected row '{g} {i}: ...'", line_no)
        try:
            row = tuple(int(tok) for tok in tail.split())
        except ValueError:
            raise ParseError("preference row must contain integers", line_no) from None
        if not _is_perm(row, n):
            raise ParseError(f"row is not a permutation of 1..{n}", line_no)
        rows.append(row)
    if n is None:
        raise ParseError("missing header 'c3dsm n=<n>'", max(line_no, 1))
    if expected:
        g, i = expected[0]
        raise ParseError(f"missing row '{g} {i}'", line_no + 1)
    return Instance(n, tuple(rows[:n]), tuple(rows[n:2 * n]), tuple(rows[2 * n:]))


def serialize_instance(inst: Instance) -> str:
    """Canonical text form: header line, then the A, B and C rows."""
    lines = [f"c3dsm n={inst.n}"]
    for g, table in zip(GROUPS, (inst.pref_a, inst.pref_b, inst.pref_c)):
        for i, row in enumerate(table, start=1):
            lines.append(f"{g} {i}: " + " ".join(map(str, row)))
    return "\n".join(lines) + "\n"


def random_instance(n: int, seed: int) -> Instance:
    """Uniform random instance from a deterministic seeded generator."""
    if n < 2:
        raise ValueError("random instances need n >= 2")
    rng = random.Random(seed)

    def table():
        rows = []
        for _ in range(n):
            row = list(range(1, n + 1))
            rng.shuffle(row)
            rows.append(tuple(row))
        return tuple(rows)

    return Instance(n, table(), table(), table())


def canonical_instances(n: int, *, max_n: int = CANONICAL_MAX_N) -> Iterator[Instance]:
    """Every instance in the symmetry-normalized form, deterministic order.

    Fixed parts: a_1's row is 1..n, b_1's row is 1..n, and c_1's row lists
    a_2..a_n in increasing order with a_1 inserted anywhere after a_2. All
    remaining rows range over all permutations. Iteration order: free A rows,
    free B rows, c_1's row, free C rows, each block lexicographic.
    """
    if n > max_n:
        raise CapacityError(
            f"canonical enumeration is guarded at n <= {max_n} (got n={n}); "
            "pass max_n explicitly to override")
    if n < 2:
        raise ValueError("canonical enumeration needs n >= 2")
    first = tuple(range(1, n + 1))
    perms = tuple(itertools.permutations(first))
    tail = list(range(2, n + 1))
    c1_rows = [tuple(tail[:pos] + [1] + tail[pos:]) for pos in range(1, n)]
    for a_rest in itertools.product(perms, repeat=n - 1):
        pref_a = (first,) + a_rest
        for b_rest in itertools.product(perms, repeat=n - 1):
            pref_b = (first,) + b_rest
            for c1 in c1_rows:
                for c_rest in itertools.product(perms, repeat=n - 1):
                    yield Instance(n, pref_a, pref_b, (c1,) + c_rest)
