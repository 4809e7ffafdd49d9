from fractions import Fraction

import pytest

from hodgelimit.dmodlocal import (
    GradedQuotient,
    TruncationTooSmall,
    _monomials_of_degree,
    build_truncated_quotient,
    char_multiplicity_local,
    generator_divisors,
    generators_annihilated,
    kernel_generators_check,
    local_model,
    r_choice_independent,
)
from hodgelimit.exactcore import ExactMatrix, ExactScalar, ZERO


def dense_quotient_dim_oracle(model, a, b):
    """Quotient dimension at one bidegree via a dense rank computation,
    fully independent of the union-find path."""
    n, k = model.n, model.k
    e = model.multiplicities
    i_alpha = model.local_index_set
    monos = [
        (z, c)
        for z in _monomials_of_degree(n + 1, a)
        for c in _monomials_of_degree(k + 1, b)
    ]
    index = {m: i for i, m in enumerate(monos)}
    rows = []
    # t_alpha multiples
    deg_t = len(i_alpha)
    if a >= deg_t:
        base = tuple(1 if i in i_alpha else 0 for i in range(n + 1))
        for z in _monomials_of_degree(n + 1, a - deg_t):
            zexp = tuple(x + y for x, y in zip(base, z))
            for c in _monomials_of_degree(k + 1, b):
                row = [ZERO] * len(monos)
                row[index[(zexp, c)]] = ExactScalar(1)
                rows.append(row)
    # D_i multiples
    if a >= 1 and b >= 1:
        for z in _monomials_of_degree(n + 1, a - 1):
            for c in _monomials_of_degree(k + 1, b - 1):
                for i in range(1, k + 1):
                    row = [ZERO] * len(monos)
                    zi = list(z)
                    zi[i] += 1
                    ci = list(c)
                    ci[i] += 1
                    row[index[(tuple(zi), tuple(ci))]] = ExactScalar(Fraction(1, e[i]))
                    z0 = list(z)
                    z0[0] += 1
                    c0 = list(c)
                    c0[0] += 1
                    row[index[(tuple(z0), tuple(c0))]] = (
                        row[index[(tuple(z0), tuple(c0))]] - ExactScalar(Fraction(1, e[0]))
                    )
                    rows.append(row)
    if not rows:
        return len(monos)
    mat = ExactMatrix(rows)
    return len(monos) - mat.rank()


def test_quotient_dims_match_dense_oracle_small():
    # n=k=1, e=(1,1): quotient by (z0 z1, z1 zeta1 - z0 zeta0)
    m = local_model(1, (1, 1), 0, 4)
    q = build_truncated_quotient(m)
    for a in range(5):
        for b in range(5):
            assert q.dim(a, b) == dense_quotient_dim_oracle(m, a, b), (a, b)


def test_quotient_dims_match_dense_oracle_23():
    m = local_model(1, (2, 3), 0, 3)
    q = build_truncated_quotient(m)
    for a in range(4):
        for b in range(4):
            assert q.dim(a, b) == dense_quotient_dim_oracle(m, a, b), (a, b)


def test_variable_elimination_case():
    # n=1, k=0, e=(1): relations (z0, zeta1): Hilbert function of Q[z1, zeta0]
    m = local_model(1, (1,), 0, 5)
    q = build_truncated_quotient(m)
    for a in range(6):
        for b in range(6):
            assert q.dim(a, b) == 1  # exactly z1^a zeta0^b survives


def test_truncation_stability():
    small = build_truncated_quotient(local_model(1, (1, 1), 0, 4))
    big = build_truncated_quotient(local_model(1, (1, 1), 0, 6))
    for a in range(5):
        for b in range(5):
            assert small.dim(a, b) == big.dim(a, b)


def test_generator_divisors():
    m = local_model(2, (1, 1, 1), 0, 4)
    assert m.mu == 2
    assert generator_divisors(m, 0) == [(0, 1), (0, 2), (1, 2)]
    assert generator_divisors(m, 2) == [()]
    m = local_model(1, (2, 3), 0, 4)
    assert generator_divisors(m, 0) == [(0,), (1,)]
    m = local_model(1, (2, 2), Fraction(1, 2), 4)
    assert m.local_index_set == (0, 1) and m.mu == 1


def test_kernel_generators_basic_cases():
    # e=(1,1), r=1: ker [R]^2 generated by the constant monomial
    m = local_model(1, (1, 1), 0, 6)
    assert kernel_generators_check(m, 1).passed
    # e=(1,1,1), r=0: generators the three quadratic divisors of t
    m = local_model(2, (1, 1, 1), 0, 6)
    assert kernel_generators_check(m, 0).passed
    # e=(2,3), alpha=0, mu=1, r=0: generators z0, z1
    m = local_model(1, (2, 3), 0, 6)
    assert kernel_generators_check(m, 0).passed


def test_one_containment_direct_multiplication():
    for e in [(1, 1), (1, 1, 1), (2, 3), (2, 2)]:
        n = len(e) - 1
        m0 = local_model(n, e, 0, 6)
        for alpha in m0.eigenvalues():
            m = local_model(n, e, alpha, 6)
            for r in range(m.mu + 1):
                assert generators_annihilated(m, r), (e, alpha, r)


def test_r_choice_independent():
    for e in [(1, 1), (2, 3), (2, 2)]:
        m = local_model(len(e) - 1, e, 0, 4)
        assert r_choice_independent(m)


def test_truncation_too_small():
    m = local_model(1, (1, 1), 0, 1)
    with pytest.raises(TruncationTooSmall):
        kernel_generators_check(m, 1)


def test_char_multiplicity():
    m = local_model(1, (2, 3), 0, 4)
    assert char_multiplicity_local(m, (0, 1)) == 5
    assert char_multiplicity_local(m, (0,)) == 2
    assert char_multiplicity_local(m, (1,)) == 3
    ones = local_model(2, (1, 1, 1), 0, 4)
    for size in (1, 2, 3):
        J = tuple(range(size))
        assert char_multiplicity_local(ones, J) == size


def test_char_multiplicity_agrees_with_degeneration_cc():
    from hodgelimit.models import two_curves_23

    spec = two_curves_23()
    cc = spec.characteristic_cycle()
    m = local_model(1, (2, 3), 0, 4)
    for J, value in cc.items():
        assert char_multiplicity_local(m, J) == value
