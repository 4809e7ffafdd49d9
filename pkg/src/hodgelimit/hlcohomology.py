"""Differentials on polarized bigraded Hodge-Lefschetz structures.

A differential d has bidegree (+1,-1), squares to zero, commutes with both
operators and is skew for the pairing.  The positive-definite form
h+(a,b) = S(C a, w1 w2 b) turns the situation into finite-dimensional Hodge
theory: with d* the h+-adjoint (equal to -w2^{-1} w1^{-1} d w1 w2) and
Delta = d d* + d* d, the space splits as ker Delta + im d + im d*, and the
harmonic space inherits the whole polarized bigraded structure.  That the
cohomology ker d / im d is again such a structure is the content realized by
``cohomology_pbhl``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .exactcore import (
    ExactMatrix,
    Flag,
    ONE,
    Subspace,
    ZERO,
    commutator,
    exp_nilpotent,
    hermitian_positive_definite,
    invert,
    kernel,
    solve_many,
)
from .hodgelefschetz import (
    BigradedHL,
    lowering_partner,
    pbhl_hodge_decomposition,
    pbhl_verify,
    weil_element,
)


class InvariantViolation(ValueError):
    pass


def _eps(k: int) -> int:
    """(-1)^{k(k-1)/2}."""
    return -1 if (k * (k - 1) // 2) % 2 else 1


class DifferentialPBHL:
    """A verified pbHL structure together with a differential matrix."""

    __slots__ = ("base", "d")

    def __init__(self, base: BigradedHL, d: ExactMatrix, check: bool = True):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "d", d)
        if check:
            errs = differential_failures(base, d)
            if errs:
                raise InvariantViolation(f"differential invariants fail: {errs[:3]}")

    def __setattr__(self, name, value):
        raise AttributeError("DifferentialPBHL is immutable")


def differential_failures(b: BigradedHL, d: ExactMatrix) -> list:
    failures = []
    total = b.total_dim
    if d.shape != (total, total):
        return [("shape", None, "differential has wrong shape")]
    for src, _ in b.order:
        for dst, _ in b.order:
            if not b.block(d, src, dst).is_zero() and dst != (src[0] + 1, src[1] - 1):
                failures.append(("degree", (src, dst), "d has an off-degree block"))
    if not (d * d).is_zero():
        failures.append(("square", None, "d^2 != 0"))
    if not commutator(b.X1, d).is_zero():
        failures.append(("commute", "X1", "[X1, d] != 0"))
    if not commutator(b.Y2, d).is_zero():
        failures.append(("commute", "Y2", "[Y2, d] != 0"))
    # skewness: S(d a, b) + S(a, d b) = 0 blockwise
    for (j, k), _ in b.order:
        dst = (j + 1, k - 1)
        if b.dim(dst) == 0:
            continue
        a_blk = b.block(d, (j, k), dst)
        b_blk = b.block(d, (-j - 1, -k + 1), (-j, -k))
        lhs = a_blk.transpose() * b.pairing(dst)
        rhs = b.pairing((j, k)) * b_blk.conj()
        if not (lhs + rhs).is_zero():
            failures.append(("skew", (j, k), "S(d-,-) + S(-,d-) != 0"))
    return failures


@dataclass(frozen=True)
class HodgeTheoryData:
    """Adjoint, Laplacian and the positive form backing them."""

    dp: DifferentialPBHL
    Y1: ExactMatrix
    X2: ExactMatrix
    w1: ExactMatrix
    w2: ExactMatrix
    C: ExactMatrix
    h_plus: ExactMatrix  # matrix of h+(a,b) = a^T h_plus conj(b)
    d_star: ExactMatrix
    laplacian: ExactMatrix


def _weights_of(b: BigradedHL, which: int) -> list:
    weights = []
    for (l, k), dim in b.order:
        w = l if which == 1 else k
        weights.extend([w] * dim)
    return weights


def _grand_pairing(b: BigradedHL) -> ExactMatrix:
    total = b.total_dim
    out = [[ZERO] * total for _ in range(total)]
    for lk, dim in b.order:
        neg = (-lk[0], -lk[1])
        if b.dim(neg) == 0:
            continue
        m = b.pairing(lk)
        ro, co = b.offsets[lk], b.offsets[neg]
        for i in range(dim):
            for j in range(b.dim(neg)):
                out[ro + i][co + j] = m.data[i][j]
    return ExactMatrix(out) if total else ExactMatrix.zeros(0, 0)


def _c_operator(b: BigradedHL, assume_verified: bool = False) -> ExactMatrix:
    """C acts by (-1)^q on each V^{p,q}_{j,k}; undefined unless the
    decomposition exists, so this refuses on unverified structures."""
    dec = pbhl_hodge_decomposition(b, assume_verified=assume_verified)
    total = b.total_dim
    cols = []
    signs = []
    for (p, q, j, k), piece in sorted(dec.pieces.items()):
        o = b.offsets[(j, k)]
        for col in piece.basis.columns():
            full = [ZERO] * total
            for i, v in enumerate(col):
                full[o + i] = v
            cols.append(full)
            signs.append(-1 if q % 2 else 1)
    basis = ExactMatrix.from_cols(total, cols)
    diag = ExactMatrix.diagonal(signs)
    return basis * diag * invert(basis)


def hodge_theory(dp: DifferentialPBHL) -> HodgeTheoryData:
    """Build the operators of the harmonic theory and verify their identities."""
    b = dp.base
    d = dp.d
    total = b.total_dim
    base_check = pbhl_verify(b)
    if not base_check.ok:
        raise InvariantViolation(
            f"underlying structure fails pbhl_verify: {base_check.failures[:3]}"
        )
    Y1 = lowering_partner(_weights_of(b, 1), b.X1)
    X2 = lowering_partner([-w for w in _weights_of(b, 2)], b.Y2)
    w1 = weil_element(b.X1, Y1)
    w2 = weil_element(X2, b.Y2)
    C = _c_operator(b, assume_verified=True)
    h_plus = C.transpose() * _grand_pairing(b) * (w1 * w2).conj()
    if not hermitian_positive_definite(h_plus):
        raise InvariantViolation("h+ is not positive definite")
    w1_inv = exp_nilpotent(-b.X1) * exp_nilpotent(Y1) * exp_nilpotent(-b.X1)
    w2_inv = exp_nilpotent(-X2) * exp_nilpotent(b.Y2) * exp_nilpotent(-X2)
    d_star = -(w2_inv * (w1_inv * d * w1) * w2)
    # the formula and the h+-adjoint characterization agree
    if d.transpose() * h_plus != h_plus * d_star.conj():
        raise InvariantViolation("adjoint formula disagrees with the h+ adjoint")
    for src, _ in b.order:
        for dst, _ in b.order:
            if not b.block(d_star, src, dst).is_zero() and dst != (src[0] - 1, src[1] + 1):
                raise InvariantViolation("d* has an off-degree block")
    if not (d_star * d_star).is_zero():
        raise InvariantViolation("d* does not square to zero")
    lap = d * d_star + d_star * d
    if not commutator(b.X1, lap).is_zero() or not commutator(b.Y2, lap).is_zero():
        raise InvariantViolation("Laplacian does not commute with the sl2 pair")
    for src, _ in b.order:
        for dst, _ in b.order:
            if src != dst and not b.block(lap, src, dst).is_zero():
                raise InvariantViolation("Laplacian does not preserve bidegree")
    # derived-operator identities: d1 = [Y1, d], d2 = -[X2, d]
    d1 = commutator(Y1, d)
    d2 = -commutator(X2, d)
    if w1 * d1 != d * w1:
        raise InvariantViolation("w1 d1 w1^{-1} != d")
    if w2 * d2 != d * w2:
        raise InvariantViolation("w2 d2 w2^{-1} != d")
    return HodgeTheoryData(dp, Y1, X2, w1, w2, C, h_plus, d_star, lap)


def adjoint(dp: DifferentialPBHL) -> ExactMatrix:
    """d* = -w2^{-1} w1^{-1} d w1 w2, also the h+-adjoint of d."""
    return hodge_theory(dp).d_star


def laplacian(dp: DifferentialPBHL) -> ExactMatrix:
    """Delta = d d* + d* d; commutes with X1, Y2 and preserves bidegree."""
    return hodge_theory(dp).laplacian


@dataclass(frozen=True)
class CohomologyResult:
    output: BigradedHL
    harmonic_basis: dict  # (l,k) -> ExactMatrix of in-block harmonic columns
    theory: HodgeTheoryData


def cohomology_pbhl(dp: DifferentialPBHL) -> CohomologyResult:
    """ker d / im d with harmonic representatives; the result carries the
    induced filtration, operators and pairing and passes pbhl_verify."""
    b = dp.base
    d = dp.d
    total = b.total_dim
    theory = hodge_theory(dp)
    lap = theory.laplacian
    d_star = theory.d_star

    harm = kernel(lap)
    ker_d = kernel(d)
    im_d = Subspace.full(total).image_under(d) if total else Subspace.zero(0)
    im_ds = Subspace.full(total).image_under(d_star) if total else Subspace.zero(0)
    if harm.dim != ker_d.dim - im_d.dim:
        raise InvariantViolation("dim ker Delta != dim ker d - dim im d")
    if harm.dim + im_d.dim + im_ds.dim != total:
        raise InvariantViolation("Hodge decomposition dims do not add up")
    for x, y in ((harm, im_d), (harm, im_ds), (im_d, im_ds)):
        if not x.intersect(y).is_zero():
            raise InvariantViolation("Hodge decomposition is not direct")
    if not ker_d.contains(harm):
        raise InvariantViolation("harmonic vectors are not closed")

    # projection onto ker Delta along im d + im d*
    q_cols = harm.basis.columns() + im_d.basis.columns() + im_ds.basis.columns()
    Q = ExactMatrix.from_cols(total, q_cols) if total else ExactMatrix.zeros(0, 0)
    Q_inv = invert(Q) if total else Q
    proj_diag = [ONE] * harm.dim + [ZERO] * (total - harm.dim)
    P = Q * ExactMatrix.diagonal(proj_diag) * Q_inv if total else Q

    # harmonic bases per bidegree
    harmonic_basis = {}
    new_pieces = {}
    embedded_cols = []
    for lk, dim in b.order:
        piece_harm = harm.intersect(b.piece_subspace(lk))
        o = b.offsets[lk]
        in_block = ExactMatrix.from_cols(
            dim, [c[o : o + dim] for c in piece_harm.basis.columns()]
        )
        if in_block.cols:
            harmonic_basis[lk] = in_block
            new_pieces[lk] = in_block.cols
            embedded_cols.extend(piece_harm.basis.columns())
    if sum(new_pieces.values()) != harm.dim:
        raise InvariantViolation("harmonic space does not split by bidegree")
    new_total = harm.dim
    embed = ExactMatrix.from_cols(total, embedded_cols) if embedded_cols else ExactMatrix.zeros(total, 0)

    def to_new_coords_block(mat: ExactMatrix) -> ExactMatrix:
        x = solve_many(embed, mat)
        if x is None:
            raise InvariantViolation("vector is not harmonic")
        return x

    def induce(mat: ExactMatrix) -> ExactMatrix:
        return to_new_coords_block(mat * embed)

    new_x1 = induce(b.X1)
    new_y2 = induce(b.Y2)

    # induced filtration: harmonic projection of F^p . ker d
    f_pieces = {}
    for p in b.f_support():
        f = b.F.dec_piece(p).intersect(ker_d)
        coords = to_new_coords_block(P * f.basis)
        f_pieces[p] = Subspace.from_columns(new_total, coords.columns())
    new_flag = Flag.from_decreasing(new_total, f_pieces) if f_pieces else Flag.trivial(new_total)

    # induced pairing: restriction to harmonic representatives
    new_offsets = {}
    t = 0
    for lk in sorted(new_pieces):
        new_offsets[lk] = t
        t += new_pieces[lk]
    new_s = {}
    for lk, dim in sorted(new_pieces.items()):
        neg = (-lk[0], -lk[1])
        if neg not in new_pieces:
            raise InvariantViolation("harmonic pieces are not pairing-symmetric")
        m = b.pairing(lk)
        new_s[lk] = harmonic_basis[lk].transpose() * m * harmonic_basis[neg].conj()

    out = BigradedHL(b.n, new_pieces, new_x1, new_y2, new_flag, new_s)
    res = pbhl_verify(out)
    if not res.ok:
        raise InvariantViolation(f"cohomology fails pbhl_verify: {res.failures[:3]}")
    return CohomologyResult(out, harmonic_basis, theory)


# ---------------------------------------------------------------------------
# fixture synthesis: Cech differentials on tensor products of irreducibles


def _sign_add(J, b) -> int:
    pos = sorted(set(J) | {b}).index(b)
    return -1 if pos % 2 else 1


def _sign_remove(J, b) -> int:
    pos = sorted(J).index(b)
    return -1 if pos % 2 else 1


def cech_fixture(
    n: int,
    subsets,
    multiplicities: dict | None = None,
    twist: int = 0,
) -> DifferentialPBHL:
    """A differential pbHL modeled on the first page of a normal-crossing
    configuration whose strata are projective spaces.

    ``subsets``: the nonempty index sets J of the configuration (closed
    under passing to nonempty subsets); a set of size r+1 carries a
    projective space of dimension n-r.  Each stratum contributes one sl2
    string of length r+1 in the second grading tensored with the Lefschetz
    string of its cohomology, with a Cech restriction / Gysin differential.
    Positivity holds by construction, so the result passes all invariants.
    """
    mult = dict(multiplicities or {})
    family = sorted({tuple(sorted(J)) for J in subsets})
    if not family:
        raise ValueError("empty configuration")
    family_set = set(family)
    basis = []  # (J, a, m): h^a on the stratum of J, string position m
    for J in family:
        r = len(J) - 1
        d_j = n - r
        if d_j < 0:
            raise ValueError(f"stratum {J} has negative dimension")
        for a in range(d_j + 1):
            for m in range(r + 1):
                basis.append((J, a, m))

    def spot(J, a, m):
        r = len(J) - 1
        d_j = n - r
        return (2 * a - d_j, r - 2 * m)

    basis.sort(key=lambda key: (spot(*key), key))
    index_of = {key: i for i, key in enumerate(basis)}
    total = len(basis)
    pieces = {}
    for key in basis:
        lk = spot(*key)
        pieces[lk] = pieces.get(lk, 0) + 1

    def mat_from(entries):
        out = [[ZERO] * total for _ in range(total)]
        for (i, j), v in entries.items():
            out[i][j] = v
        return ExactMatrix(out)

    all_indices = sorted(set().union(*[set(x) for x in family]))
    x1 = {}
    y2 = {}
    dmat = {}
    for j_col, (J, a, m) in enumerate(basis):
        r = len(J) - 1
        d_j = n - r
        if a + 1 <= d_j:
            x1[(index_of[(J, a + 1, m)], j_col)] = ONE
        if m + 1 <= r:
            y2[(index_of[(J, a, m + 1)], j_col)] = ONE
        # restriction part: J -> J u {b}, position m+1, multiplicity weight e_b
        for b_new in all_indices:
            if b_new in J:
                continue
            J2 = tuple(sorted(set(J) | {b_new}))
            key = (J2, a, m + 1)
            if J2 in family_set and key in index_of:
                e_b = mult.get(b_new, 1)
                dmat[(index_of[key], j_col)] = (
                    dmat.get((index_of[key], j_col), ZERO)
                    + ONE * (_sign_add(J, b_new) * e_b)
                )
        # Gysin part: J -> J minus {b}, same position, degree +2, global minus
        if m <= r - 1:
            for b_old in J:
                J2 = tuple(sorted(set(J) - {b_old}))
                if not J2:
                    continue
                key = (J2, a + 1, m)
                if key in index_of:
                    dmat[(index_of[key], j_col)] = (
                        dmat.get((index_of[key], j_col), ZERO)
                        - ONE * _sign_remove(J, b_old)
                    )

    X1 = mat_from(x1)
    Y2 = mat_from(y2)
    D = mat_from(dmat)

    # filtration from Hodge types: h^a has type a, the string position m
    # carries a Tate tag (r - m); a global twist shifts types down
    def ptype(J, a, m):
        return a + (len(J) - 1 - m) - twist

    f_pieces = {}
    all_p = sorted({ptype(*key) for key in basis})
    for p in range(min(all_p), max(all_p) + 2):
        cols = []
        for i, key in enumerate(basis):
            if ptype(*key) >= p:
                v = [ZERO] * total
                v[i] = ONE
                cols.append(v)
        f_pieces[p] = Subspace.from_columns(total, cols)
    flag = Flag.from_decreasing(total, f_pieces)

    # pairing: eps(l) (-1)^{l d_J} / C_J times B_{2a}(h^a, h^{d-a}) per string,
    # with B_{2a}(h^a, h^{d-a}) = eps(d+1)(-1)^{d-a}
    pos_in_block = {}
    counters = {}
    for key in basis:
        lk = spot(*key)
        pos_in_block[key] = counters.get(lk, 0)
        counters[lk] = counters.get(lk, 0) + 1
    s_blocks = {
        lk: [[ZERO] * pieces.get((-lk[0], -lk[1]), 0) for _ in range(dim)]
        for lk, dim in pieces.items()
    }
    for key in basis:
        J, a, m = key
        r = len(J) - 1
        d_j = n - r
        lk = spot(*key)
        partner = (J, d_j - a, r - m)
        l = lk[0]
        c_j = Fraction(1)
        for b_idx in J:
            c_j /= mult.get(b_idx, 1)
        base_val = _eps(d_j + 1) * ((-1) ** ((d_j - a) % 2))
        sign = _eps(l) * ((-1) ** ((l * d_j) % 2)) * ((-1) ** (twist % 2))
        s_blocks[lk][pos_in_block[key]][pos_in_block[partner]] = ONE * (sign * base_val) * c_j
    s = {
        lk: ExactMatrix(rows) if rows else ExactMatrix.zeros(0, pieces.get((-lk[0], -lk[1]), 0))
        for lk, rows in s_blocks.items()
    }

    base = BigradedHL(n - 2 * twist, pieces, X1, Y2, flag, s)
    return DifferentialPBHL(base, D)


def cycle_configuration(count: int):
    """Vertices and edges of the count-cycle (a cycle of rational curves)."""
    verts = [(i,) for i in range(count)]
    edges = sorted({tuple(sorted((i, (i + 1) % count))) for i in range(count)})
    return verts + edges


def chain_configuration(count: int):
    """Vertices and edges of the count-path (a chain of rational curves,
    the semistable degeneration of a single rational curve)."""
    verts = [(i,) for i in range(count)]
    edges = [(i, i + 1) for i in range(count - 1)]
    return verts + edges


def disjoint_cycles_configuration(a: int, b: int):
    first = cycle_configuration(a)
    second = [tuple(x + a for x in J) for J in cycle_configuration(b)]
    return first + second


def standard_fixtures():
    """A deterministic family of >= 20 differential pbHL fixtures built as
    tensor products of sl2 strings over Cech-type configurations."""
    out = []
    for count in (3, 4, 5, 6, 7, 8):
        out.append((f"cycle-{count}", cech_fixture(1, cycle_configuration(count))))
        out.append(
            (
                f"cycle-{count}-mult2",
                cech_fixture(
                    1,
                    cycle_configuration(count),
                    multiplicities={i: 2 for i in range(count)},
                ),
            )
        )
    for count in (3, 4, 5, 6):
        out.append((f"chain-{count}", cech_fixture(1, chain_configuration(count))))
    out.append(
        (
            "chain-4-mult5",
            cech_fixture(1, chain_configuration(4), multiplicities={i: 5 for i in range(4)}),
        )
    )
    out.append(
        (
            "cycle-4-mixed-mult",
            cech_fixture(1, cycle_configuration(4), multiplicities={0: 2, 1: 3, 2: 2, 3: 3}),
        )
    )
    out.append(("disjoint-3-4", cech_fixture(1, disjoint_cycles_configuration(3, 4))))
    for tw in (-1, 1):
        out.append((f"cycle-3-twist{tw}", cech_fixture(1, cycle_configuration(3), twist=tw)))
        out.append((f"chain-3-twist{tw}", cech_fixture(1, chain_configuration(3), twist=tw)))
    return out
