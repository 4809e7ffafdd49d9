import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from hodgelimit.exactcore import (
    AmbientMismatch,
    ExactMatrix,
    ExactScalar,
    Flag,
    I,
    NotHermitian,
    ONE,
    Subspace,
    ZERO,
    hermitian_positive_definite,
    kernel,
    matrix_from_json,
    matrix_to_json,
    rref,
    scalar,
    solve,
    subspace_ops,
)


def rand_scalar(rng, span=5, gauss=False):
    re = Fraction(rng.randint(-span, span), rng.randint(1, 4))
    im = Fraction(rng.randint(-span, span), rng.randint(1, 4)) if gauss else 0
    return ExactScalar(re, im)


def rand_matrix(rng, rows, cols, gauss=False):
    return ExactMatrix([[rand_scalar(rng, gauss=gauss) for _ in range(cols)] for _ in range(rows)])


def minor_rank_oracle(m):
    """Rank as the largest size of a nonvanishing minor (brute force)."""
    best = 0
    for size in range(1, min(m.rows, m.cols) + 1):
        found = False
        for ridx in combinations(range(m.rows), size):
            for cidx in combinations(range(m.cols), size):
                sub = ExactMatrix([[m.data[i][j] for j in cidx] for i in ridx])
                if not sub.det().is_zero():
                    found = True
                    break
            if found:
                break
        if found:
            best = size
        else:
            break
    return best


# ---------------------------------------------------------------------- scalars


def test_scalar_field_axioms_smoke():
    a = scalar("2/3", "1/2")
    b = scalar("-1/5")
    assert (a * b) / b == a
    assert a + (-a) == ZERO
    assert a.conj().conj() == a
    assert (a * a.conj()).is_real()
    assert a.norm2() > 0 and ZERO.norm2() == 0


@given(
    st.fractions(min_value=-9, max_value=9, max_denominator=7),
    st.fractions(min_value=-9, max_value=9, max_denominator=7),
    st.fractions(min_value=-9, max_value=9, max_denominator=7),
    st.fractions(min_value=-9, max_value=9, max_denominator=7),
)
@settings(max_examples=60, deadline=None)
def test_scalar_conj_is_ring_hom(a, b, c, d):
    x = ExactScalar(a, b)
    y = ExactScalar(c, d)
    assert (x * y).conj() == x.conj() * y.conj()
    assert (x + y).conj() == x.conj() + y.conj()
    assert x.norm2() == (x * x.conj()).re


def test_scalar_grammar_roundtrip():
    cases = ["3/4", "-3/4", "0/1", "1/2+-1/3 i", "-7/5+2/9 i", "0/1+1/1 i"]
    for text in cases:
        s = ExactScalar.parse(text)
        assert str(s) == text or ExactScalar.parse(str(s)) == s
    assert str(scalar(3, 0)) == "3/1"
    assert str(I) == "0/1+1/1 i"
    with pytest.raises(ValueError):
        ExactScalar.parse("3")  # denominator is mandatory
    with pytest.raises(ValueError):
        ExactScalar.parse("1/2 + 1/3 i")  # stray spaces


# ---------------------------------------------------------------------- rref


def test_rref_identity_fixed_point():
    m = ExactMatrix.identity(3)
    assert rref(m) == m


def test_rref_rank_one():
    m = ExactMatrix([[2, 4], [1, 2]])
    assert rref(m) == ExactMatrix([[1, 2], [0, 0]])


def test_rref_rank_matches_minor_oracle():
    rng = random.Random(20250811)
    for _ in range(12):
        m = rand_matrix(rng, 6, 6)
        assert m.rank() == minor_rank_oracle(m)


def test_rref_idempotent_and_rowspace_preserved():
    rng = random.Random(7)
    for _ in range(8):
        m = rand_matrix(rng, 4, 5, gauss=True)
        r = rref(m)
        assert rref(r) == r
        # row spaces agree: stack and check rank does not grow
        assert m.vstack(r).rank() == m.rank()


# ---------------------------------------------------------------------- kernel


def test_kernel_zero_matrix():
    assert kernel(ExactMatrix.zeros(2, 3)) == Subspace.full(3)


def test_kernel_identity():
    assert kernel(ExactMatrix.identity(4)) == Subspace.zero(4)


def test_kernel_jordan_block():
    j3 = ExactMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    ker = kernel(j3)
    assert ker.dim == 1
    assert ker.contains_vector([ONE, ZERO, ZERO])


def test_kernel_annihilation_exact():
    rng = random.Random(99)
    for _ in range(10):
        m = rand_matrix(rng, 4, 6, gauss=True)
        ker = kernel(m)
        assert ker.dim == 6 - m.rank()
        for c in ker.basis.columns():
            assert all(v.is_zero() for v in m.apply(c))


# ---------------------------------------------------------------------- subspaces


def rand_subspace(rng, ambient, dim):
    cols = [[rand_scalar(rng) for _ in range(ambient)] for _ in range(dim)]
    return Subspace.from_columns(ambient, cols)


def test_subspace_ops_equal_spaces():
    rng = random.Random(3)
    a = rand_subspace(rng, 4, 2)
    ops = subspace_ops(a, a)
    assert ops.sum == a and ops.intersection == a
    assert ops.quotient_basis == [] and ops.containment


def test_subspace_ops_complementary_lines():
    e1 = Subspace.from_columns(2, [[1, 0]])
    e2 = Subspace.from_columns(2, [[0, 1]])
    ops = subspace_ops(e1, e2)
    assert ops.sum == Subspace.full(2)
    assert ops.intersection == Subspace.zero(2)
    assert not ops.containment


def test_subspace_dimension_identity_random():
    rng = random.Random(20250811)
    for _ in range(10):
        a = rand_subspace(rng, 6, 3)
        b = rand_subspace(rng, 6, 4)
        ops = subspace_ops(a, b)
        assert ops.sum.dim + ops.intersection.dim == a.dim + b.dim
        assert len(ops.quotient_basis) == a.dim - ops.intersection.dim


@given(st.integers(0, 3), st.integers(0, 3), st.integers(0, 3), st.integers(0, 2 ** 30))
@settings(max_examples=40, deadline=None)
def test_subspace_modularity_and_associativity(da, db, dc, seed):
    rng = random.Random(seed)
    a = rand_subspace(rng, 5, da)
    b = rand_subspace(rng, 5, db)
    c = rand_subspace(rng, 5, dc)
    assert a.add(b).add(c) == a.add(b.add(c))
    assert a.intersect(b).intersect(c) == a.intersect(b.intersect(c))
    # modular law when c contains a
    cc = c.add(a)
    assert a.add(b.intersect(cc)) == a.add(b).intersect(cc)


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        subspace_ops(Subspace.zero(2), Subspace.zero(3))


# ---------------------------------------------------------------------- flags


def test_flag_basics():
    s1 = Subspace.from_columns(3, [[1, 0, 0]])
    flag = Flag(3, {-1: s1, 1: Subspace.full(3)})
    assert flag.piece(-2) == Subspace.zero(3)
    assert flag.piece(-1) == s1 == flag.piece(0)
    assert flag.piece(5) == Subspace.full(3)
    assert flag.dec_piece(1) == s1
    assert flag.support() == (-1, 1)


def test_flag_rejects_nonincreasing():
    s1 = Subspace.from_columns(2, [[1, 0]])
    s2 = Subspace.from_columns(2, [[0, 1]])
    with pytest.raises(ValueError):
        Flag(2, {0: s1, 1: s2})


# ---------------------------------------------------------------------- hermitian


def test_hpd_identity_and_indefinite():
    assert hermitian_positive_definite(ExactMatrix.identity(3))
    assert not hermitian_positive_definite(ExactMatrix.diagonal([1, -1]))


def test_hpd_gaussian_example():
    m = ExactMatrix([[scalar(2), I], [-I, scalar(2)]])
    assert hermitian_positive_definite(m)
    # minors are 2 and 3
    assert m.det() == scalar(3)


def test_hpd_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_positive_definite(ExactMatrix([[0, 1], [0, 0]]))


def test_hpd_agrees_with_random_vector_sampling():
    rng = random.Random(20250811)
    b = rand_matrix(rng, 3, 3, gauss=True)
    m = b.conj_t() * b + ExactMatrix.identity(3)  # definite by construction
    assert hermitian_positive_definite(m)
    for _ in range(100):
        v = [rand_scalar(rng, gauss=True) for _ in range(3)]
        if all(x.is_zero() for x in v):
            continue
        val = sum((vi.conj() * sum((m.data[i][j] * v[j] for j in range(3)), ZERO)
                   for i, vi in enumerate(v)), ZERO)
        assert val.is_real() and val.re > 0


# ---------------------------------------------------------------------- misc


def test_solve_consistency():
    m = ExactMatrix([[1, 2], [3, 4]])
    x = solve(m, [scalar(5), scalar(11)])
    assert m.apply(x) == [scalar(5), scalar(11)]
    singular = ExactMatrix([[1, 2], [2, 4]])
    assert solve(singular, [scalar(1), scalar(3)]) is None


def test_matrix_json_roundtrip():
    rng = random.Random(5)
    m = rand_matrix(rng, 3, 4, gauss=True)
    obj = matrix_to_json(m)
    assert matrix_from_json(obj) == m
    empty = ExactMatrix.zeros(0, 3)
    assert matrix_from_json(matrix_to_json(empty)).shape == (0, 3)


def test_image_preimage():
    m = ExactMatrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    line = Subspace.from_columns(3, [[1, 0, 0]])
    img = Subspace.full(3).image_under(m)
    assert img.dim == 2
    pre = line.preimage_under(m)
    assert pre.dim == 2
    for c in pre.basis.columns():
        assert line.contains_vector(m.apply(c))
