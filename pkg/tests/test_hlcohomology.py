import random
from fractions import Fraction

import pytest

from hodgelimit.exactcore import (
    ExactMatrix,
    Flag,
    ONE,
    Subspace,
    ZERO,
    commutator,
    hermitian_positive_semidefinite,
)
from hodgelimit.hlcohomology import (
    DifferentialPBHL,
    InvariantViolation,
    adjoint,
    cech_fixture,
    chain_configuration,
    cohomology_pbhl,
    cycle_configuration,
    differential_failures,
    hodge_theory,
    laplacian,
    standard_fixtures,
)
from hodgelimit.hodgelefschetz import BigradedHL, pbhl_verify


def i3():
    return cech_fixture(1, cycle_configuration(3))


def test_zero_differential_cohomology_is_input():
    dp = i3()
    zero = DifferentialPBHL(dp.base, ExactMatrix.zeros(dp.base.total_dim, dp.base.total_dim))
    res = cohomology_pbhl(zero)
    assert res.output.pieces == dp.base.pieces
    assert adjoint(zero).is_zero()
    assert laplacian(zero).is_zero()


def test_invariants_reject_bad_differential():
    dp = i3()
    total = dp.base.total_dim
    bad = ExactMatrix.identity(total)  # wrong degree, nonzero square
    errs = differential_failures(dp.base, bad)
    assert errs
    with pytest.raises(InvariantViolation):
        DifferentialPBHL(dp.base, bad)


def test_adjoint_properties_i3():
    dp = i3()
    th = hodge_theory(dp)
    # d* has bidegree (-1,+1) and squares to zero (checked internally);
    # spot check the adjointness matrix identity once more
    assert dp.d.transpose() * th.h_plus == th.h_plus * th.d_star.conj()
    assert (th.d_star * th.d_star).is_zero()
    # derived operators: d1 = [Y1, d] satisfies w1 d1 = d w1 (checked in
    # hodge_theory); Laplacian commutes with the sl2 pair
    assert commutator(dp.base.X1, th.laplacian).is_zero()
    assert commutator(dp.base.Y2, th.laplacian).is_zero()


def test_laplacian_psd_certificate_small():
    dp = cech_fixture(1, chain_configuration(3))
    th = hodge_theory(dp)
    # matrix of h+(Delta ., .) is Hermitian positive semidefinite
    m = th.laplacian.transpose() * th.h_plus
    assert hermitian_positive_semidefinite(m)
    # sampled h+(Delta a, a) >= 0
    rng = random.Random(20250811)
    total = dp.base.total_dim
    for _ in range(25):
        v = [Fraction(rng.randint(-3, 3)) for _ in range(total)]
        val = ZERO
        lap_v = th.laplacian.apply([ONE * x for x in v])
        hv = ExactMatrix([[x] for x in lap_v]).transpose() * th.h_plus
        for j, vj in enumerate(v):
            val = val + hv.data[0][j] * (ONE * vj).conj()
        assert val.is_real() and val.re >= 0


def test_hodge_decomposition_dims():
    dp = i3()
    th = hodge_theory(dp)
    total = dp.base.total_dim
    from hodgelimit.exactcore import kernel

    harm = kernel(th.laplacian)
    ker_d = kernel(dp.d)
    im_d = Subspace.full(total).image_under(dp.d)
    im_ds = Subspace.full(total).image_under(th.d_star)
    assert harm.dim == ker_d.dim - im_d.dim
    assert harm.dim + im_d.dim + im_ds.dim == total
    assert harm.intersect(im_d).is_zero()
    assert harm.intersect(im_ds).is_zero()
    assert im_d.intersect(im_ds).is_zero()


def test_i_n_cohomology_shape():
    for count in (3, 4, 5):
        dp = cech_fixture(1, cycle_configuration(count))
        res = cohomology_pbhl(dp)
        assert res.output.pieces == {(-1, 0): 1, (0, -1): 1, (0, 1): 1, (1, 0): 1}
        assert pbhl_verify(res.output).ok


def test_chain_cohomology_is_p1():
    res = cohomology_pbhl(cech_fixture(1, chain_configuration(4)))
    assert res.output.pieces == {(-1, 0): 1, (1, 0): 1}


def test_acyclic_differential_gives_zero():
    # two pieces joined by an isomorphism d: build V_{0,1} -> V_{1,0} both
    # one-dimensional with compatible structure: take the chain fixture and
    # keep only the middle, or simpler: assert that a fixture with an exact
    # d1 row has zero cohomology at those spots. The chain of length 2 has
    # E2 = H(P^1): spots (0,+-1) vanish entirely.
    res = cohomology_pbhl(cech_fixture(1, chain_configuration(2)))
    assert (0, 1) not in res.output.pieces
    assert (0, -1) not in res.output.pieces


def test_pairing_independent_of_representative():
    # quotient pairing: S([x],[y]) = S(x_harm + d a, y_harm + d b) is
    # independent of a, b by skewness and closedness
    dp = i3()
    res = cohomology_pbhl(dp)
    th = res.theory
    base = dp.base
    total = base.total_dim
    from hodgelimit.hlcohomology import _grand_pairing

    M = _grand_pairing(base)
    rng = random.Random(7)
    harm_cols = []
    for lk, mat in sorted(res.harmonic_basis.items()):
        o = base.offsets[lk]
        for c in mat.columns():
            v = [ZERO] * total
            for i, x in enumerate(c):
                v[o + i] = x
            harm_cols.append(v)
    for _ in range(5):
        x = harm_cols[rng.randrange(len(harm_cols))]
        y = harm_cols[rng.randrange(len(harm_cols))]
        a = [ONE * Fraction(rng.randint(-2, 2)) for _ in range(total)]
        b = [ONE * Fraction(rng.randint(-2, 2)) for _ in range(total)]
        xa = [u + v for u, v in zip(x, dp.d.apply(a))]
        yb = [u + v for u, v in zip(y, dp.d.apply(b))]

        def pair(u, v):
            out = ZERO
            for i, ui in enumerate(u):
                if not ui:
                    continue
                for j, vj in enumerate(v):
                    if vj and M.data[i][j]:
                        out = out + ui * M.data[i][j] * vj.conj()
            return out

        assert pair(x, y) == pair(xa, yb)


def test_standard_fixture_count_and_validity():
    fixtures = standard_fixtures()
    assert len(fixtures) >= 20
    names = [name for name, _ in fixtures]
    assert len(set(names)) == len(names)
