"""Sequence arithmetic, lattice structure, norms and membership."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from martlat.seqcore import (
    INFINITE,
    ONE,
    ExtSeq,
    NormKind,
    SEQ_ALL,
    SPACE_C,
    SPACE_C0,
    SPACE_L1,
    SPACE_LINF,
    SchemaError,
    Tail,
    basis_seq,
    cesaro_mean,
    const_seq,
    finite_dim,
    first_difference,
    first_violation,
    limit_functional,
    periodic_seq,
    seq,
    seq_abs,
    seq_from_json,
    seq_in_space,
    seq_join,
    seq_lattice,
    seq_leq,
    seq_linear,
    seq_meet,
    seq_neg,
    seq_norm,
    seq_scale,
    seq_shift,
    seq_to_json,
    seq_with_coordinate,
    zero_seq,
)

F = Fraction


def l1_term(n: int, trunc: int) -> ExtSeq:
    """Term n of the positive unbounded martingale on l1, truncated at
    pair `trunc` with the remaining geometric mass folded into that pair
    (doubling its entry keeps every exact norm identity)."""
    vals: list[Fraction] = []
    for k in range(1, trunc + 1):
        if k < n:
            vals += [F(1), F(0)]
        elif k < trunc:
            vals += [F(0), F(1, 2 ** (k - 1))]
        else:
            vals += [F(0), F(4, 2 ** trunc)]
    return seq(vals)


rationals = st.fractions(min_value=-4, max_value=4, max_denominator=8)


@st.composite
def extseqs(draw):
    prefix = draw(st.lists(rationals, max_size=5))
    kind = draw(st.sampled_from(["zero", "const", "periodic"]))
    if kind == "zero":
        tail = Tail("zero")
    elif kind == "const":
        tail = Tail("const", draw(rationals))
    else:
        block = draw(st.lists(rationals, min_size=1, max_size=4))
        tail = Tail("periodic", block=tuple(block))
    return ExtSeq(tuple(prefix), tail)


class TestCanonical:
    def test_trailing_prefix_absorbed_into_zero_tail(self):
        assert seq([1, 0, 0]) == seq([1])

    def test_trailing_prefix_absorbed_into_const_tail(self):
        assert seq([2, 3], Tail("const", 3)) == seq([2], Tail("const", 3))

    def test_prefix_absorbed_with_rotation(self):
        padded = seq([5, 1], Tail("periodic", block=(F(2), F(1))))
        assert padded == seq([5], Tail("periodic", block=(F(1), F(2))))

    def test_periodic_reduces_to_minimal_period(self):
        assert periodic_seq([1, 2, 1, 2]) == periodic_seq([1, 2])

    def test_constant_block_collapses(self):
        assert periodic_seq([3, 3]) == const_seq(3)
        assert periodic_seq([0, 0, 0]) == zero_seq()

    @given(extseqs(), st.integers(min_value=0, max_value=6),
           st.integers(min_value=1, max_value=3))
    def test_padding_does_not_change_identity(self, a, extra, times):
        # re-express a with a longer prefix and an unrolled period
        L = len(a.prefix) + extra
        prefix = a.window(L)
        q = a.tail_period * times
        block = tuple(a.value_at(L + 1 + j) for j in range(q))
        assert ExtSeq(prefix, Tail("periodic", block=block)) == a

    @given(extseqs())
    def test_coordinates_survive_canonicalization(self, a):
        raw = list(a.prefix) + [a.tail.entry(j) for j in range(8)]
        for i, v in enumerate(raw, start=1):
            assert a.value_at(i) == v


class TestLinear:
    def test_basis_sum(self):
        assert seq_linear(basis_seq(1), basis_seq(2), 1, 1) == seq([1, 1])

    def test_l1_example_difference(self):
        # independent oracle: coordinatewise subtraction over the first
        # 8 coordinates, zero beyond (both tails are zero past the pairs)
        a, b = l1_term(1, 6), l1_term(2, 6)
        got = seq_linear(a, b, 1, -1)
        for i in range(1, 9):
            assert got.value_at(i) == a.value_at(i) - b.value_at(i)
        assert got == seq([-1, 1])

    def test_identity_combination(self):
        a = periodic_seq([1, -2], prefix=[7])
        assert seq_linear(a, zero_seq(), 1, 0) == a

    @given(extseqs(), extseqs(), rationals, rationals)
    def test_matches_coordinatewise_oracle(self, a, b, al, be):
        got = seq_linear(a, b, al, be)
        span = len(a.prefix) + len(b.prefix) + 2 * a.tail_period * b.tail_period
        for i in range(1, span + 2):
            assert got.value_at(i) == al * a.value_at(i) + be * b.value_at(i)


class TestAbsAndLattice:
    def test_abs_of_alternating_prefix(self):
        x2 = seq([-1, 1, -1, 1])
        assert seq_abs(x2) == seq([1, 1, 1, 1])

    def test_abs_const_tail(self):
        assert seq_abs(const_seq(-3)) == const_seq(3)

    def test_abs_periodic(self):
        assert seq_abs(periodic_seq([1, -1, 0])) == periodic_seq([1, 1, 0])

    def test_join_of_basis_vectors(self):
        assert seq_join(basis_seq(1), basis_seq(2)) == seq([1, 1])

    def test_alternating_terms_dominated_by_one(self):
        xn = seq([-1, 1] * 4)
        assert seq_leq(xn, ONE)
        assert seq_leq(seq_neg(xn), ONE)

    def test_meet_const_periodic(self):
        got = seq_meet(const_seq(2), periodic_seq([1, 3]))
        # oracle: coordinatewise min over one aligned period
        assert got == periodic_seq([1, 2])
        for i in range(1, 7):
            assert got.value_at(i) == min(F(2), periodic_seq([1, 3]).value_at(i))

    def test_lattice_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            seq_lattice(ONE, ONE, "sup")

    @given(extseqs(), extseqs())
    def test_meet_join_commute(self, a, b):
        assert seq_meet(a, b) == seq_meet(b, a)
        assert seq_join(a, b) == seq_join(b, a)

    @given(extseqs(), extseqs(), extseqs())
    @settings(max_examples=60)
    def test_lattice_associative_absorptive(self, a, b, c):
        assert seq_join(a, seq_join(b, c)) == seq_join(seq_join(a, b), c)
        assert seq_meet(a, seq_meet(b, c)) == seq_meet(seq_meet(a, b), c)
        assert seq_join(a, seq_meet(a, b)) == a
        assert seq_meet(a, seq_join(a, b)) == a

    @given(extseqs())
    def test_abs_is_join_with_negation(self, a):
        assert seq_abs(a) == seq_join(a, seq_neg(a))

    @given(extseqs(), extseqs())
    def test_leq_agrees_with_coordinates(self, a, b):
        span = len(a.prefix) + len(b.prefix) + 2 * a.tail_period * b.tail_period + 2
        oracle = all(a.value_at(i) <= b.value_at(i) for i in range(1, span + 1))
        assert seq_leq(a, b) == oracle
        v = first_violation(a, b)
        if v is not None:
            assert a.value_at(v) > b.value_at(v)
            assert all(a.value_at(i) <= b.value_at(i) for i in range(1, v))


class TestNorms:
    def test_one_under_sup_limsup_is_two(self):
        assert seq_norm(ONE, NormKind.SUP_LIMSUP) == 2

    def test_l1_example_first_term_norm_is_two(self):
        # geometric series oracle: 1 + sum 2^{-k} = 2, summed in closed form
        for trunc in (4, 9, 21):
            assert seq_norm(l1_term(1, trunc), NormKind.L1) == 2

    def test_zero_sequence_all_kinds(self):
        for kind in NormKind:
            assert seq_norm(zero_seq(), kind) == 0

    def test_l1_of_nonzero_tail_is_infinite(self):
        assert seq_norm(ONE, NormKind.L1) == INFINITE
        assert seq_norm(periodic_seq([0, 1]), NormKind.L1) == INFINITE

    @given(extseqs(), extseqs())
    def test_monotone_on_positive_pairs(self, a, b):
        x, y = seq_abs(a), seq_abs(b)
        lo, hi = seq_meet(x, y), seq_join(x, y)
        for kind in NormKind:
            assert seq_norm(lo, kind) <= seq_norm(hi, kind)

    @given(extseqs())
    def test_sup_limsup_equivalent_to_sup(self, a):
        s = seq_norm(a, NormKind.SUP)
        t = seq_norm(a, NormKind.SUP_LIMSUP)
        assert s <= t <= 2 * s


class TestSpaces:
    def test_oscillating_tail_not_convergent(self):
        # oracle: membership in c is read off the tail variant
        a = periodic_seq([1, 1, 0])
        assert a.tail.kind == "periodic"
        assert not seq_in_space(a, SPACE_C)

    def test_const_one_not_null_sequence(self):
        assert not seq_in_space(ONE, SPACE_C0)

    def test_finite_support_in_c0(self):
        assert seq_in_space(seq([1, 1]), SPACE_C0)

    def test_memberships_by_tail(self):
        fin = seq([1, 2])
        assert seq_in_space(fin, SPACE_L1)
        assert seq_in_space(fin, SPACE_C)
        assert seq_in_space(ONE, SPACE_C)
        assert not seq_in_space(ONE, SPACE_L1)
        assert seq_in_space(periodic_seq([1, 0]), SPACE_LINF)
        assert seq_in_space(periodic_seq([1, 0]), SEQ_ALL)

    def test_finite_dim(self):
        assert seq_in_space(seq([1, 0, 2]), finite_dim(3))
        assert not seq_in_space(seq([1, 0, 2, 5]), finite_dim(3))
        assert not seq_in_space(ONE, finite_dim(3))


class TestLimitFunctional:
    def test_eventually_zero(self):
        assert limit_functional(seq([1] * 8)) == 0

    def test_const_one(self):
        assert limit_functional(ONE) == 1

    def test_period_mean(self):
        # oracle: average of the block
        assert limit_functional(periodic_seq([1, 0])) == F(1, 2)

    @given(extseqs(), extseqs(), rationals, rationals)
    def test_linear(self, a, b, al, be):
        assert limit_functional(seq_linear(a, b, al, be)) == \
            al * limit_functional(a) + be * limit_functional(b)

    @given(extseqs())
    def test_positive_and_shift_invariant(self, a):
        assert limit_functional(seq_abs(a)) >= 0
        assert limit_functional(seq_shift(a)) == limit_functional(a)

    @given(extseqs(), st.integers(min_value=1, max_value=4),
           st.integers(min_value=0, max_value=3))
    def test_cesaro_means_refine_the_mean(self, a, q, r):
        means = [cesaro_mean(a, q, j) for j in range(q)]
        assert sum(means, F(0)) / q == limit_functional(a)
        # translation by one full modulus leaves the class mean alone
        assert cesaro_mean(seq_shift(a, q), q, r % q) == cesaro_mean(a, q, r % q)


class TestHelpers:
    def test_shift_into_tail(self):
        a = periodic_seq([1, 2, 3], prefix=[9])
        assert seq_shift(a, 2) == periodic_seq([2, 3, 1])

    def test_with_coordinate_beyond_prefix(self):
        got = seq_with_coordinate(ONE, 3, 0)
        assert got == seq([1, 1, 0], Tail("const", 1))
        assert got.value_at(3) == 0 and got.value_at(4) == 1

    def test_first_difference(self):
        assert first_difference(ONE, ONE) is None
        assert first_difference(seq([1, 2]), seq([1, 3])) == 2
        assert first_difference(ONE, periodic_seq([1, 0])) == 2

    @given(extseqs(), rationals)
    def test_scale_and_neg(self, a, al):
        assert seq_scale(a, al) == seq_linear(a, a, al, 0)
        assert seq_neg(seq_neg(a)) == a


class TestSerialization:
    @given(extseqs())
    def test_round_trip(self, a):
        assert seq_from_json(seq_to_json(a)) == a

    def test_reads_integer_and_fraction_strings(self):
        obj = {"prefix": ["1/2", 3], "tail": {"kind": "const", "value": "-2/3"}}
        assert seq_from_json(obj) == seq([F(1, 2), 3], Tail("const", F(-2, 3)))

    def test_schema_errors_carry_paths(self):
        with pytest.raises(SchemaError) as err:
            seq_from_json({"prefix": [1.5], "tail": {"kind": "zero"}}, path="x")
        assert "x.prefix[0]" in str(err.value)
        with pytest.raises(SchemaError):
            seq_from_json({"prefix": [], "tail": {"kind": "geometric"}})
        with pytest.raises(SchemaError):
            seq_from_json({"prefix": [], "tail": {"kind": "periodic", "block": []}})
        with pytest.raises(SchemaError):
            seq_from_json([1, 2])
