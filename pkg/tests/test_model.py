import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from c3dsm import model
from c3dsm.model import (CapacityError, Instance, Matching, ParseError, Triple,
                         candidate_triples, canonical_instances, canonicalize,
                         count_stable_matchings, enumerate_matchings,
                         extend_matching, is_blocking, is_stable,
                         mutual_top_triple, parse_instance, prefers,
                         random_instance, reduce_by_triple, relabel,
                         serialize_instance, stable_matchings)


def unanimous(n):
    row = tuple(range(1, n + 1))
    return Instance(n, (row,) * n, (row,) * n, (row,) * n)


def diagonal(n):
    ident = tuple(range(1, n + 1))
    return Matching(ident, ident)


# ---------------------------------------------------------------- instances

def test_instance_rejects_bad_rows():
    with pytest.raises(ValueError):
        Instance(2, ((1, 1), (1, 2)), ((1, 2), (2, 1)), ((1, 2), (2, 1)))
    with pytest.raises(ValueError):
        Instance(2, ((1, 2),), ((1, 2), (2, 1)), ((1, 2), (2, 1)))
    with pytest.raises(ValueError):
        Instance(0, (), (), ())


def test_instance_is_hashable_and_normalized():
    a = Instance(2, [[1, 2], [2, 1]], [[1, 2], [1, 2]], [[2, 1], [1, 2]])
    b = Instance(2, ((1, 2), (2, 1)), ((1, 2), (1, 2)), ((2, 1), (1, 2)))
    assert a == b and hash(a) == hash(b)


def test_matching_partners():
    m = Matching((2, 3, 1), (3, 1, 2))
    # triples: (a1,b2,c1) (a2,b3,c2) (a3,b1,c3)
    assert m.triples() == [Triple(1, 2, 1), Triple(2, 3, 2), Triple(3, 1, 3)]
    for a, b, c in m.triples():
        assert m.b_of(a) == b and m.c_of(b) == c and m.a_of(c) == a


def test_matching_rejects_non_permutations():
    with pytest.raises(ValueError):
        Matching((1, 1), (1, 2))
    with pytest.raises(ValueError):
        Matching((1, 2), (1,))


# ----------------------------------------------------------------- prefers

def test_prefers_top_beats_all():
    inst = unanimous(3)
    assert prefers(inst, "A", 1, 1, 2) is True
    assert prefers(inst, "A", 1, 2, 1) is False


def test_prefers_input_errors():
    inst = unanimous(3)
    with pytest.raises(ValueError):
        prefers(inst, "A", 1, 2, 2)
    with pytest.raises(ValueError):
        prefers(inst, "A", 1, 0, 2)
    with pytest.raises(ValueError):
        prefers(inst, "D", 1, 1, 2)


def test_prefers_matches_position_scan_oracle():
    # independent oracle: scan the row for the positions on every call
    for seed in range(30):
        inst = random_instance(4, seed)
        for role, table in zip("ABC", (inst.pref_a, inst.pref_b, inst.pref_c)):
            for p in range(1, 5):
                row = table[p - 1]
                for q, r in itertools.permutations(range(1, 5), 2):
                    assert prefers(inst, role, p, q, r) == (row.index(q) < row.index(r))


@settings(max_examples=60)
@given(st.integers(0, 2 ** 63 - 1), st.integers(2, 5))
def test_prefers_antisymmetry(seed, n):
    inst = random_instance(n, seed)
    for role in "ABC":
        for p in range(1, n + 1):
            for q, r in itertools.combinations(range(1, n + 1), 2):
                assert prefers(inst, role, p, q, r) != prefers(inst, role, p, r, q)


def test_prefers_transitivity_on_generated_instances():
    insts = [random_instance(4, s) for s in range(10)]
    insts.append(parse_instance(serialize_instance(unanimous(4))))
    insts.extend(itertools.islice(canonical_instances(3), 5))
    for inst in insts:
        n = inst.n
        for role in "ABC":
            for p in range(1, n + 1):
                for q, r, s in itertools.permutations(range(1, n + 1), 3):
                    if prefers(inst, role, p, q, r) and prefers(inst, role, p, r, s):
                        assert prefers(inst, role, p, q, s)


# ------------------------------------------------------------- is_blocking

def test_blocking_top_choice_cannot_be_beaten():
    inst = unanimous(3)
    assert is_blocking(inst, diagonal(3), Triple(2, 1, 1)) is False


def test_blocking_false_on_matched_pair():
    for seed in range(10):
        inst = random_instance(3, seed)
        for m in enumerate_matchings(3):
            for a in range(1, 4):
                t = Triple(a, m.b_of(a), (a % 3) + 1)
                assert is_blocking(inst, m, t) is False


def test_blocking_agrees_with_direct_definition():
    # independent re-implementation reading rank positions directly
    def oracle(inst, m, t):
        a, b, c = t
        ra = inst.pref_a[a - 1]
        rb = inst.pref_b[b - 1]
        rc = inst.pref_c[c - 1]
        return (ra.index(b) < ra.index(m.b_of(a))
                and rb.index(c) < rb.index(m.c_of(b))
                and rc.index(a) < rc.index(m.a_of(c)))

    for seed in range(20):
        inst = random_instance(3, seed)
        m = Matching((2, 3, 1), (1, 3, 2))
        for t in itertools.product(range(1, 4), repeat=3):
            assert is_blocking(inst, m, Triple(*t)) == oracle(inst, m, Triple(*t))


# ---------------------------------------------------------------- stability

def test_unanimous_diagonal_is_stable():
    inst = unanimous(3)
    # brute force over all 36 matchings confirms membership
    stables = stable_matchings(inst)
    assert diagonal(3) in stables
    assert is_stable(inst, diagonal(3))


def test_unanimous_shifted_tau_is_unstable():
    inst = unanimous(3)
    m = Matching((1, 2, 3), (2, 3, 1))
    assert not is_stable(inst, m)
    assert any(is_blocking(inst, m, Triple(*t))
               for t in itertools.product(range(1, 4), repeat=3))


def test_candidate_scan_equals_full_scan():
    for seed in range(25):
        inst = random_instance(3, seed)
        for m in enumerate_matchings(3):
            full = any(is_blocking(inst, m, Triple(*t))
                       for t in itertools.product(range(1, 4), repeat=3))
            cand = any(is_blocking(inst, m, t) for t in candidate_triples(m, 3))
            assert is_stable(inst, m) == (not full) == (not cand)


def test_every_n3_instance_has_a_stable_matching():
    for seed in range(200):
        assert count_stable_matchings(random_instance(3, seed), stop_after=1) == 1


def test_stable_matchings_matches_count():
    for seed in range(10):
        inst = random_instance(3, seed)
        ms = stable_matchings(inst)
        assert len(ms) == count_stable_matchings(inst)
        assert all(is_stable(inst, m) for m in ms)


def test_search_guard():
    inst = unanimous(6)
    with pytest.raises(CapacityError):
        stable_matchings(inst)
    with pytest.raises(CapacityError):
        count_stable_matchings(inst)


def test_degenerate_sizes():
    one = Instance(1, ((1,),), ((1,),), ((1,),))
    ms = stable_matchings(one)
    assert len(ms) == 1 and ms[0] == Matching((1,), (1,))
    two = Instance(2, ((1, 2), (2, 1)), ((1, 2), (1, 2)), ((2, 1), (1, 2)))
    assert count_stable_matchings(two) == 4  # no candidate triples at n=2


# ---------------------------------------------------------------- candidates

def test_candidate_counts():
    assert len(candidate_triples(diagonal(3), 3)) == 6
    assert len(candidate_triples(diagonal(5), 5)) == 60
    assert len(candidate_triples(diagonal(2), 2)) == 0


def test_candidates_lexicographic_and_brute_filtered():
    for n in (1, 2, 3, 4):
        for m in enumerate_matchings(n):
            cands = candidate_triples(m, n)
            brute = [Triple(a, b, c)
                     for a in range(1, n + 1)
                     for b in range(1, n + 1)
                     for c in range(1, n + 1)
                     if b != m.b_of(a) and c != m.c_of(b) and a != m.a_of(c)]
            assert cands == brute  # brute loop is already lexicographic
            assert len(cands) == n * (n - 1) * (n - 2)


# --------------------------------------------------------------- enumeration

def test_enumeration_counts_and_order():
    assert sum(1 for _ in enumerate_matchings(3)) == 36
    assert sum(1 for _ in enumerate_matchings(1)) == 1
    ms = list(enumerate_matchings(2))
    assert [(m.sigma, m.tau) for m in ms] == [
        ((1, 2), (1, 2)), ((1, 2), (2, 1)), ((2, 1), (1, 2)), ((2, 1), (2, 1))]


def test_enumeration_count_n5():
    ms = enumerate_matchings(5)
    assert next(ms).sigma == (1, 2, 3, 4, 5)
    assert 1 + sum(1 for _ in ms) == 14400


def test_stability_scan_at_n5():
    # n=5 uses the streaming scan path (no per-matching cache)
    inst = unanimous(5)
    assert is_stable(inst, diagonal(5))
    assert count_stable_matchings(inst, stop_after=1) == 1


def test_remark1_campaign_accepts_n5():
    from c3dsm.campaigns import remark1_check
    rep = remark1_check(5, trials=25, seed=3)
    assert rep.passed
    assert rep.instances_checked == 25


# ----------------------------------------------------------- mutual top etc.

def test_mutual_top_unanimous():
    assert mutual_top_triple(unanimous(4)) == Triple(1, 1, 1)


def test_mutual_top_absent():
    # top chains a1 -> b1 -> c1 -> a2 and a2 -> b2 -> c2 -> a1: neither closes
    inst = Instance(2, ((1, 2), (2, 1)), ((1, 2), (2, 1)), ((2, 1), (1, 2)))
    assert mutual_top_triple(inst) is None
    # flipping c2's row closes the second chain at a = 2
    inst = Instance(2, ((1, 2), (2, 1)), ((1, 2), (2, 1)), ((2, 1), (2, 1)))
    assert mutual_top_triple(inst) == Triple(2, 2, 2)


def test_mutual_top_matches_cubic_scan():
    for seed in range(300):
        inst = random_instance(4, seed)
        found = [Triple(a, b, c)
                 for a in range(1, 5) for b in range(1, 5) for c in range(1, 5)
                 if inst.pref_a[a - 1][0] == b and inst.pref_b[b - 1][0] == c
                 and inst.pref_c[c - 1][0] == a]
        assert mutual_top_triple(inst) == (found[0] if found else None)


def test_reduce_unanimous():
    assert reduce_by_triple(unanimous(3), Triple(1, 1, 1)) == unanimous(2)


def test_reduce_requires_mutual_top():
    with pytest.raises(ValueError):
        reduce_by_triple(unanimous(3), Triple(2, 2, 2))


def test_reduce_preserves_relative_order():
    for seed in range(100):
        inst = random_instance(4, seed)
        t = mutual_top_triple(inst)
        if t is None:
            continue
        red = reduce_by_triple(inst, t)
        surv_a = [x for x in range(1, 5) if x != t.a]
        surv_b = [x for x in range(1, 5) if x != t.b]
        new_a = {old: i + 1 for i, old in enumerate(surv_a)}
        new_b = {old: i + 1 for i, old in enumerate(surv_b)}
        for p in surv_a:
            for q, r in itertools.permutations(surv_b, 2):
                assert (prefers(inst, "A", p, q, r)
                        == prefers(red, "A", new_a[p], new_b[q], new_b[r]))


def test_reduction_extension_is_stable_n3_n4():
    for n in (3, 4):
        hits = 0
        for seed in range(150):
            inst = random_instance(n, seed)
            t = mutual_top_triple(inst)
            if t is None:
                continue
            hits += 1
            for m_red in stable_matchings(reduce_by_triple(inst, t)):
                ext = extend_matching(m_red, t)
                assert is_stable(inst, ext)
        assert hits > 0


# ------------------------------------------------------------ parse / print

def test_parse_example():
    text = "c3dsm n=2\nA 1: 1 2\nA 2: 2 1\nB 1: 1 2\nB 2: 1 2\nC 1: 2 1\nC 2: 1 2\n"
    inst = parse_instance(text)
    assert inst.n == 2 and inst.pref_c[0] == (2, 1)
    assert serialize_instance(inst) == text


def test_parse_accepts_comments_and_bytes():
    text = "# a comment\nc3dsm n=2\n# another\nA 1: 1 2\nA 2: 2 1\nB 1: 1 2\nB 2: 1 2\nC 1: 2 1\nC 2: 1 2\n"
    assert parse_instance(text.encode()).n == 2


@pytest.mark.parametrize("text,line", [
    ("c3dsm n=2\nA 1: 1 1\n", 2),
    ("c3dsm size=2\n", 1),
    ("c3dsm n=2\nB 1: 1 2\n", 2),
    ("c3dsm n=2\nA 1: 1 2\nA 2: 2 1\nB 1: 1 2\nB 2: 1 2\nC 1: 2 1\nC 2: 1 2\nC 3: 1 2\n", 8),
])
def test_parse_errors_carry_line_numbers(text, line):
    with pytest.raises(ParseError) as exc:
        parse_instance(text)
    assert exc.value.line == line


def test_parse_missing_rows():
    with pytest.raises(ParseError):
        parse_instance("c3dsm n=2\nA 1: 1 2\n")


def test_roundtrip_many_seeds():
    for seed in range(1000):
        inst = random_instance(3, seed)
        assert parse_instance(serialize_instance(inst)) == inst


@settings(max_examples=50)
@given(st.integers(0, 2 ** 63 - 1), st.integers(2, 6))
def test_roundtrip_property(seed, n):
    inst = random_instance(n, seed)
    assert parse_instance(serialize_instance(inst)) == inst


# ------------------------------------------------------------------ random

def test_random_instance_deterministic():
    assert random_instance(4, 99) == random_instance(4, 99)


def test_random_instances_distinct_across_seeds():
    seen = {random_instance(4, seed) for seed in range(100)}
    assert len(seen) == 100


def test_random_instance_needs_n2():
    with pytest.raises(ValueError):
        random_instance(1, 0)


# --------------------------------------------------------------- canonical

def test_canonical_count_and_shape():
    count = 0
    for inst in canonical_instances(3):
        count += 1
        assert inst.pref_a[0] == (1, 2, 3)
        assert inst.pref_b[0] == (1, 2, 3)
        assert prefers(inst, "C", 1, 2, 1)
    assert count == 93312


def test_canonical_guard():
    with pytest.raises(CapacityError):
        next(canonical_instances(4))
    # explicit override unlocks larger sizes
    inst = next(canonical_instances(4, max_n=4))
    assert inst.pref_a[0] == (1, 2, 3, 4)


def test_canonical_first_instances_deterministic():
    first = list(itertools.islice(canonical_instances(3), 3))
    again = list(itertools.islice(canonical_instances(3), 3))
    assert first == again
    assert first[0].pref_c[0] == (2, 1, 3)


# ---------------------------------------------------------- relabel helpers

def test_relabel_preserves_stable_count():
    import random as _random
    rng = _random.Random(5)
    for seed in range(40):
        inst = random_instance(3, seed)
        base = count_stable_matchings(inst)
        perm = lambda: tuple(rng.sample(range(1, 4), 3))
        rel = relabel(inst, perm(), perm(), perm())
        assert count_stable_matchings(rel) == base


def test_canonicalize_properties():
    for seed in range(60):
        inst = random_instance(3, seed)
        canon = canonicalize(inst)
        assert canon.pref_a[0] == (1, 2, 3)
        assert canon.pref_b[0] == (1, 2, 3)
        row = canon.pref_c[0]
        no_a1 = [v for v in row if v != 1]
        assert no_a1 == sorted(no_a1)
        assert count_stable_matchings(canon) == count_stable_matchings(inst)
