import random
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import pytest

from transemi import (
    AbstractSystem,
    OracleBudgetError,
    check_representability,
    closure_fixpoint,
    closure_step,
    derivation_chain,
    is_closed,
    least_closed_oracle,
    member_at_round,
    verify_witness_tree,
)
from transemi.bitsets import full_mask
from transemi.closure import _kernel
from transemi.instances import parse_instance

from naive import naive_step

DATA = Path(__file__).parent / "data"


def s1(with_delta=True):
    return AbstractSystem([[0]], [[0]], [[True]], [[with_delta]])


def all_nonempty(m):
    return range(1, 1 << m)


class TestStep:
    def test_one_element_fixpoint(self):
        assert closure_step(s1(), 0b1) == 0b1

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="empty"):
            closure_step(s1(), 0)

    def test_matches_naive_reference(self, abstract_corpus):
        small = [a for a in abstract_corpus if a.size <= 3]
        assert small
        for sys in small:
            for h in all_nonempty(sys.size):
                assert closure_step(sys, h) == naive_step(sys, h)

    def test_matches_naive_reference_larger(self, abstract_corpus):
        mid = [a for a in abstract_corpus if 4 <= a.size <= 5][:6]
        assert mid
        for sys in mid:
            for h in all_nonempty(sys.size):
                assert closure_step(sys, h) == naive_step(sys, h)

    def test_closedness_is_step_containment(self, abstract_corpus):
        # H is closed exactly when one step adds nothing outside H
        for sys in abstract_corpus:
            if sys.size > 4:
                continue
            for h in all_nonempty(sys.size):
                contained = closure_step(sys, h) & ~h == 0
                assert is_closed(sys, h, "implication") == contained

    def test_contains_seed(self, abstract_corpus):
        for sys in abstract_corpus[:40]:
            for x in range(sys.size):
                h = 1 << x
                assert closure_step(sys, h) & h == h

    def test_monotone_and_inflationary(self, abstract_corpus):
        rng = random.Random(5)
        for sys in abstract_corpus[:30]:
            m = sys.size
            h1 = rng.randrange(1, 1 << m)
            h2 = h1 | rng.randrange(1 << m)
            s1_, s2 = closure_step(sys, h1), closure_step(sys, h2)
            assert s1_ & ~s2 == 0
            assert s1_ & h1 == h1 and s2 & h2 == h2


class TestFixpoint:
    def test_one_element(self):
        res = closure_fixpoint(s1(), 0b1)
        assert res.closed_bits == 0b1 and res.rounds == 1

    def test_idempotent(self, abstract_corpus):
        for sys in abstract_corpus[:25]:
            for x in range(sys.size):
                res = closure_fixpoint(sys, 1 << x)
                again = closure_fixpoint(sys, res.closed_bits)
                assert again.closed_bits == res.closed_bits
                assert again.rounds == 1

    def test_rounds_bounded_by_carrier(self, abstract_corpus):
        for sys in abstract_corpus[:40]:
            for x in range(sys.size):
                for y in range(sys.size):
                    res = closure_fixpoint(sys, (1 << x) | (1 << y), witnesses=False)
                    assert res.rounds <= sys.size

    def test_result_closed_under_both_methods(self, abstract_corpus):
        for sys in abstract_corpus:
            if sys.size > 5:
                continue
            for h in all_nonempty(sys.size):
                bits = closure_fixpoint(sys, h, witnesses=False).closed_bits
                assert is_closed(sys, bits, "implication")
                assert is_closed(sys, bits, "four-conditions")

    def test_witnesses_are_deterministic_and_grounded(self, abstract_corpus):
        for sys in abstract_corpus[:20]:
            for x in range(sys.size):
                a = closure_fixpoint(sys, 1 << x)
                b = closure_fixpoint(sys, 1 << x)
                assert a.witness == b.witness
                for z, (rnd, _) in a.witness.items():
                    chain = derivation_chain(sys, a, z)
                    assert chain and chain[-1]["element"] == z
                    assert all(s["round"] <= rnd for s in chain)

    def test_rejects_empty(self):
        with pytest.raises(ValueError, match="empty"):
            closure_fixpoint(s1(), 0)


class TestIsClosed:
    def test_full_carrier_always_closed(self, abstract_corpus):
        for sys in abstract_corpus[:30]:
            full = full_mask(sys.size)
            assert is_closed(sys, full, "implication")
            assert is_closed(sys, full, "four-conditions")

    def test_methods_agree_exhaustively(self, abstract_corpus):
        for sys in abstract_corpus:
            if sys.size > 4:
                continue
            for h in all_nonempty(sys.size):
                assert is_closed(sys, h, "implication") == is_closed(
                    sys, h, "four-conditions"
                )

    def test_empty_set(self):
        assert is_closed(s1(), 0, "implication")
        with pytest.raises(ValueError):
            is_closed(s1(), 0, "four-conditions")

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            is_closed(s1(), 1, "guesswork")


class TestOracle:
    def test_one_element(self):
        assert least_closed_oracle(s1(), 0b1) == 0b1

    def test_full_carrier(self, abstract_m2):
        for sys in abstract_m2[:10]:
            assert least_closed_oracle(sys, 0b11) & 0b11 == 0b11

    def test_agrees_with_fixpoint(self, abstract_corpus):
        for sys in abstract_corpus:
            if sys.size > 4:
                continue
            for h in all_nonempty(sys.size):
                assert (
                    closure_fixpoint(sys, h, witnesses=False).closed_bits
                    == least_closed_oracle(sys, h)
                )

    def test_budget(self, monkeypatch):
        big = AbstractSystem(
            [[0] * 13 for _ in range(13)],
            [[min(i, j) for j in range(13)] for i in range(13)],
            [[True] * 13 for _ in range(13)],
            [[False] * 13 for _ in range(13)],
        )
        with pytest.raises(OracleBudgetError, match="budget exceeded"):
            least_closed_oracle(big, 1)

    def test_budget_env_override(self, monkeypatch):
        monkeypatch.setenv("TRANSEMI_ORACLE_BUDGET", "3")
        four = AbstractSystem(
            [[0, 0, 0, 0]] * 4,
            [[min(i, j) for j in range(4)] for i in range(4)],
            [[True] * 4] * 4,
            [[False] * 4] * 4,
        )
        with pytest.raises(OracleBudgetError):
            least_closed_oracle(four, 1)
        monkeypatch.setenv("TRANSEMI_ORACLE_BUDGET", "13")
        big = AbstractSystem(
            [[0] * 13 for _ in range(13)],
            [[min(i, j) for j in range(13)] for i in range(13)],
            [[True] * 13 for _ in range(13)],
            [[False] * 13 for _ in range(13)],
        )
        assert least_closed_oracle(big, 1) == closure_fixpoint(big, 1).closed_bits


class TestMemberAtRound:
    def test_round_one_is_the_step(self, abstract_corpus):
        for sys in abstract_corpus:
            if sys.size > 3:
                continue
            for h in all_nonempty(sys.size):
                stepped = closure_step(sys, h)
                for z in range(sys.size):
                    got, tree = member_at_round(sys, z, h, 1, method="direct")
                    assert got == bool((stepped >> z) & 1)
                    if got:
                        assert verify_witness_tree(sys, z, h, 1, tree)

    def test_round_two_matches_iteration(self, abstract_corpus):
        for sys in abstract_corpus:
            if sys.size > 3:
                continue
            kern = _kernel(sys)
            for h in all_nonempty(sys.size):
                f2 = closure_step(sys, closure_step(sys, h))
                for z in range(sys.size):
                    got, tree = member_at_round(sys, z, h, 2, method="direct")
                    assert got == bool((f2 >> z) & 1)
                    if got:
                        assert verify_witness_tree(sys, z, h, 2, tree)

    def test_seed_members_at_every_round(self, abstract_corpus):
        for sys in abstract_corpus[:15]:
            for x in range(sys.size):
                for n in (1, 2, 3):
                    got, tree = member_at_round(sys, x, 1 << x, n, method="iterate")
                    assert got
                    assert verify_witness_tree(sys, x, 1 << x, n, tree)

    def test_direct_bounds_enforced(self):
        with pytest.raises(ValueError, match="direct search bounded"):
            member_at_round(s1(), 0, 1, 3, method="direct")

    def test_bad_arguments(self):
        with pytest.raises(ValueError):
            member_at_round(s1(), 0, 1, 0)
        with pytest.raises(ValueError):
            member_at_round(s1(), 0, 0, 1)


class TestSchemeInstances:
    def test_fixed_depth_instances_hold_on_passing_systems(self, abstract_corpus):
        # on systems passing the aggregated axioms, every fixed-depth
        # membership instance forces the same conclusions
        small = [a for a in abstract_corpus if a.size <= 3]
        for sys in small:
            if not check_representability(sys).passed:
                continue
            m = sys.size
            for n in (1, 2):
                for x in range(m):
                    for y in range(m):
                        w = int(sys.meet[x, y])
                        p = int(sys.mul[x, y])
                        if member_at_round(sys, w, 1 << x, n, method="direct")[0]:
                            assert sys.zeta[x, y]
                        if member_at_round(sys, p, 1 << x, n, method="direct")[0]:
                            assert sys.delta[x, y]
                        pair = (1 << x) | (1 << y)
                        if member_at_round(sys, w, pair, n, method="direct")[0]:
                            assert sys.xi[x, y]

    def test_fixed_depth_instance_fails_on_golden(self):
        sys = parse_instance(DATA / "axiom_fail_semicompat.yaml").build()
        pair = (1 << 1) | (1 << 2)
        w = int(sys.meet[1, 2])
        got, tree = member_at_round(sys, w, pair, 1, method="direct")
        assert got and not sys.xi[1, 2]
        assert verify_witness_tree(sys, w, pair, 1, tree)


class TestCache:
    def test_concurrent_fill_consistent(self, abstract_corpus):
        sys = next(a for a in abstract_corpus if a.size >= 4)
        seeds = [(1 << x) | (1 << y) for x in range(sys.size) for y in range(sys.size)]
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(sys.closures.closed_bits, seeds))
        for seed, bits in zip(seeds, results):
            assert bits == closure_fixpoint(sys, seed, witnesses=False).closed_bits

    def test_memo_reused(self, abstract_m2):
        sys = abstract_m2[0]
        assert sys.closures is sys.closures
        a = sys.closures.of_pair(0, 1)
        b = sys.closures.of_pair(1, 0)
        assert a == b


class TestRepresentabilityAxioms:
    def test_one_element_passes(self):
        assert check_representability(s1()).passed

    def test_corpus_roundtrips_pass(self, trans_corpus):
        for sys in trans_corpus[:25]:
            assert check_representability(sys.abstract()).passed

    def test_missing_adjacency_fails(self):
        rep = check_representability(s1(with_delta=False))
        assert not rep.passed
        bad = rep["closure-forces-adjacency"]
        assert not bad.passed
        w = bad.witnesses[0]
        assert w["x"] == 0 and w["y"] == 0 and w["chain"] == []

    def test_golden_adjacency_failure(self):
        sys = parse_instance(DATA / "axiom_fail_adjacency.yaml").build()
        from transemi import validate

        assert validate(sys).passed
        rep = check_representability(sys)
        assert [r.check_id for r in rep.failures()] == ["closure-forces-adjacency"]

    def test_golden_semicompat_failure(self):
        sys = parse_instance(DATA / "axiom_fail_semicompat.yaml").build()
        from transemi import validate

        assert validate(sys).passed
        rep = check_representability(sys)
        failed = {r.check_id for r in rep.failures()}
        assert "closure-forces-semicompat" in failed
        w = rep["closure-forces-semicompat"].witnesses[0]
        assert w["chain"]  # non-trivial derivation

    def test_fuzz_search_finds_adjacency_failure(self):
        # smallest systems with xi equal to the order and no adjacency:
        # deterministic search over one- and two-element carriers
        from transemi import validate
        from transemi.generators import semigroup_tables, semilattice_tables, _unflatten
        import numpy as np

        found = None
        for m in (1, 2):
            for mul in semigroup_tables(m):
                for meet in semilattice_tables(m):
                    zeta = [[meet[x * m + y] == x for y in range(m)] for x in range(m)]
                    sys = AbstractSystem(
                        _unflatten(mul, m), _unflatten(meet, m),
                        zeta, np.zeros((m, m), dtype=bool),
                    )
                    if not validate(sys).passed:
                        continue
                    rep = check_representability(sys)
                    if not rep["closure-forces-adjacency"].passed:
                        found = sys
                        break
                if found:
                    break
            if found:
                break
        assert found is not None
        golden = parse_instance(DATA / "axiom_fail_adjacency.yaml").build()
        assert found.size == golden.size == 1
        assert not found.delta.any() and not golden.delta.any()
