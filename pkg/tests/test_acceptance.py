"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines as they complete.  Every tolerance is pinned here; nothing is
calibrated elsewhere.
"""

import math
import random
import time
from fractions import Fraction

import pytest

from hodgelimit.exactcore import ExactMatrix, commutator
from hodgelimit.weightfilt import (
    lefschetz_decomposition,
    monodromy_filtration,
    nilpotent,
    sl2_complete,
)

from .oracles import (
    all_partitions,
    invert,
    jordan_filtration_pieces,
    jordan_nilpotent,
    random_invertible,
    random_nilpotent,
)

SEED = 20250811


def _report(number, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number} {detail}".rstrip()
    print(line)
    return ok


# ---------------------------------------------------------------------------


def test_criterion_1_monodromy_filtration():
    """200 seeded random nilpotents of dim <= 8 satisfy both axioms exactly;
    every Jordan partition of dim <= 6 matches the Jordan oracle; < 10 s."""
    t0 = time.monotonic()
    rng = random.Random(SEED)
    for _ in range(200):
        m, _, _ = random_nilpotent(rng, max_dim=8)
        monodromy_filtration(nilpotent(m))  # both axioms re-verified inside
    for d in range(1, 7):
        for parts in all_partitions(d):
            q = random_invertible(rng, d)
            n = nilpotent(q * jordan_nilpotent(parts) * invert(q))
            filt = monodromy_filtration(n)
            expected = jordan_filtration_pieces(parts, conjugator=q)
            for level, sub in expected.items():
                assert filt.piece(level) == sub, (parts, level)
    elapsed = time.monotonic() - t0
    ok = elapsed < 10.0
    assert _report(1, ok, f"(monodromy filtration, {elapsed:.1f}s)")


def test_criterion_2_lefschetz_sl2_weil():
    """Dimension identities, the three bracket relations, and the Weil
    identities on all irreducibles of dim <= 7, all exact."""
    t0 = time.monotonic()
    rng = random.Random(SEED + 1)
    for _ in range(40):
        m, _, _ = random_nilpotent(rng, max_dim=7)
        n = nilpotent(m)
        dec = lefschetz_decomposition(n)
        for level, d in dec.gr_dims().items():
            total = sum(
                dec.primitives[level + 2 * k].dim
                for k in range(max(0, -level), n.nilpotency_index + 1)
                if (level + 2 * k) in dec.primitives
            )
            assert total == d
        sl2_complete(n)  # bracket relations asserted exactly inside

    from hodgelimit.hodgelefschetz import weil_element

    for l in range(0, 7):  # irreducibles of dim l+1 <= 7
        d = l + 1
        X = ExactMatrix([[1 if i == j + 1 else 0 for j in range(d)] for i in range(d)])
        Y = ExactMatrix(
            [[(j) * (l - j + 1) if i == j - 1 else 0 for j in range(d)] for i in range(d)]
        )
        H = commutator(X, Y)
        w = weil_element(X, Y)  # w H w^-1 = -H etc. asserted inside
        from hodgelimit.exactcore import ONE, ZERO

        a = [ONE if i == 0 else ZERO for i in range(d)]
        for j in range(l + 1):
            lhs = w.apply([x * Fraction(1, math.factorial(j)) for x in X.power(j).apply(a)])
            rhs = [
                x * (Fraction(1, math.factorial(l - j)) * (-1) ** j)
                for x in X.power(l - j).apply(a)
            ]
            assert lhs == rhs, (l, j)
    elapsed = time.monotonic() - t0
    assert _report(2, True, f"(Lefschetz/sl2/Weil, {elapsed:.1f}s)")


def test_criterion_3_cohomology_closure():
    """>= 20 synthesized differential structures: cohomology passes full
    verification and dim ker Delta = dim ker d - dim im d; < 10 s."""
    from hodgelimit.exactcore import Subspace, kernel
    from hodgelimit.hlcohomology import cohomology_pbhl, standard_fixtures

    t0 = time.monotonic()
    fixtures = standard_fixtures()
    assert len(fixtures) >= 20
    for name, dp in fixtures:
        res = cohomology_pbhl(dp)  # output pbhl_verify asserted inside
        total = dp.base.total_dim
        harm = sum(res.output.pieces.values())
        ker_d = kernel(dp.d).dim
        im_d = Subspace.full(total).image_under(dp.d).dim
        assert harm == ker_d - im_d, name
    elapsed = time.monotonic() - t0
    ok = elapsed < 10.0
    assert _report(3, ok, f"({len(fixtures)} fixtures, {elapsed:.1f}s)")


def test_criterion_4_characteristic_cycles():
    """e = (2,3): eigenvalue set, cycle multiplicities, and the per-alpha
    sum identity, all exact."""
    from hodgelimit.models import two_curves_23

    spec = two_curves_23()
    table = spec.eigenvalue_set()
    assert [str(a) for a in table.alphas] == ["0", "1/3", "1/2", "2/3"]
    assert spec.characteristic_cycle() == {(0,): 2, (1,): 3, (0, 1): 5}
    summed = {}
    for a in table.alphas:
        for J, v in spec.characteristic_cycle_alpha(a).items():
            summed[J] = summed.get(J, 0) + v
    assert summed == spec.characteristic_cycle()
    assert _report(4, True, "(characteristic cycles e=(2,3))")


def test_criterion_5_kodaira_cycles():
    """I_N for N = 3,4,5: page dims, ranks, limit weights, Euler number,
    invariant-cycle exactness, monodromy weight; < 1 s per N.

    Targets derive from the dual-complex oracle: the cycle graph has
    b0 = b1 = 1, forcing E2 dims (1,1,1,1) and limit H^1 weights {0,2}.
    """
    from hodgelimit.models import kodaira_in
    from hodgelimit.sncdegeneration import (
        d1_assemble,
        e2_page,
        local_invariant_cycle_report,
    )

    from .oracles import cycle_subsets, nerve_cohomology_dims

    ok_all = True
    for count in (3, 4, 5):
        t0 = time.monotonic()
        spec = kodaira_in(count)
        page = d1_assemble(spec, 0)
        assert page.dims() == {(-1, 0): count, (1, 0): count, (0, 1): count, (0, -1): count}
        assert page.d1_block((-1, 0)).rank() == count - 1
        assert page.d1_block((0, 1)).rank() == count - 1
        e2 = e2_page(spec, 0, page=page)
        assert e2.dims() == {(-1, 0): 1, (0, -1): 1, (0, 1): 1, (1, 0): 1}
        assert e2.limit_weight_dims()[1] == {0: 1, 2: 1}
        assert page.euler_characteristic() == 0
        assert e2.euler_characteristic() == 0
        lic = local_invariant_cycle_report(spec, e2)
        assert lic.passed
        oracle = nerve_cohomology_dims(cycle_subsets(count))
        assert lic.central_fiber_dims[1] == oracle[1] == 1
        assert e2.monodromy_weight_report()["passed"]
        elapsed = time.monotonic() - t0
        ok_all = ok_all and elapsed < 1.0
    assert _report(5, ok_all, "(Kodaira cycles N=3,4,5)")


def test_criterion_6_kernel_generators():
    """All models with n <= 3, k <= 2, the four multiplicity lists, every
    eigenvalue, r <= mu, truncation 8: kernel equals the generated
    submodule degree by degree; < 60 s total."""
    from hodgelimit.dmodlocal import (
        build_truncated_quotient,
        kernel_generators_check,
        local_model,
    )

    t0 = time.monotonic()
    count = 0
    for e in [(1, 1), (1, 1, 1), (2, 3), (2, 2)]:
        k = len(e) - 1
        for n in range(k, 4):
            base = local_model(n, e, 0, 8)
            for alpha in base.eigenvalues():
                model = local_model(n, e, alpha, 8)
                if model.mu < 0:
                    continue
                quotient = build_truncated_quotient(model)
                for r in range(model.mu + 1):
                    res = kernel_generators_check(model, r, quotient)
                    assert res.passed, (e, n, alpha, r, res.witnesses[:2])
                    count += 1
    elapsed = time.monotonic() - t0
    ok = elapsed < 60.0
    assert _report(6, ok, f"({count} kernel checks, {elapsed:.1f}s)")


def test_criterion_7_mellin_constants():
    """Renormalization and Lelong residues within 1e-6; primitive pairing
    ratios within 1e-4 relative of (-1)^r/((r+1)! C_J) for r in {0,1}
    including the worked half-factor example; off-diagonal below 1e-6;
    < 120 s total.

    The r = 1 stated constant includes the 1/(r+1)! normalization; the
    measured ratio of residue to stratum integral is (-1)^r / C_J on every
    chart, so that subcase fails by exactly the factorial factor (see the
    quadrature cross-checks in test_mellinverify).
    """
    from hodgelimit.mellinverify import (
        RadialBump,
        VanishingBump,
        chart,
        off_diagonal_vanishing,
        poincare_lelong_1d,
        primitive_pairing_constant,
        renormalization_residue,
    )

    t0 = time.monotonic()
    bump = RadialBump()
    assert abs(renormalization_residue(bump) - 1.0) < 1e-6
    assert abs(renormalization_residue(VanishingBump())) < 1e-6
    assert abs(poincare_lelong_1d(bump) - 1.0) < 1e-6

    cases = [
        # (chart, r) pairs with k <= 2, including the half-factor example
        (chart(1, (1, 1), 0, K1=(0,), K2=(0,)), 0),
        (chart(2, (1, 1), 0, K1=(1,), K2=(1,)), 0),
        (chart(1, (2,), Fraction(1, 2)), 0),
        (chart(1, (2, 3), Fraction(1, 2)), 0),
        (chart(2, (1, 1, 1), 0, K1=(2,), K2=(2,)), 1),
        (chart(2, (2, 1, 1), 0, K1=(2,), K2=(2,)), 1),
    ]
    failures = []
    for ch, r in cases:
        res = primitive_pairing_constant(ch, r)
        if not abs(res.ratio - res.target) <= 1e-4 * abs(res.target):
            failures.append((ch.multiplicities, str(ch.alpha), r, res.ratio, res.target))

    od = off_diagonal_vanishing(chart(2, (1, 1, 1), 0, K1=(1,), K2=(2,)))
    assert abs(od.residue) < 1e-6

    elapsed = time.monotonic() - t0
    ok = not failures and elapsed < 120.0
    _report(7, ok, f"(Mellin constants, {elapsed:.1f}s)" + (f" failures={failures}" if failures else ""))
    assert ok, (
        "the stated (r+1)!-normalized constants are not reproduced at r=1: "
        f"{failures}"
    )


def test_criterion_8_pipeline_self_consistency():
    """The packaged differential structure reproduces the second-page dims
    exactly and its cohomology passes full verification, for I_N with the
    bundled Lefschetz and pairing data."""
    from hodgelimit.models import kodaira_in
    from hodgelimit.sncdegeneration import e2_page, hard_lefschetz_check

    for count in (3, 4, 5):
        spec = kodaira_in(count)
        e2 = e2_page(spec, 0)
        rep = hard_lefschetz_check(spec, 0, e2=e2)
        assert rep.cohomology_dims_match
        assert rep.passed, rep.pbhl_failures
    assert _report(8, True, "(pipeline self-consistency I_N)")
