"""Monodromy weight filtrations of nilpotent endomorphisms.

Given a nilpotent operator N on a finite-dimensional space, there is a unique
increasing filtration W centered at 0 with N.W_l inside W_{l-2} such that the
induced map N^l : gr_l -> gr_{-l} is an isomorphism for every l >= 0.  This
module constructs W, the primitive parts P_l = ker(N^{l+1}) on gr_l, the
Lefschetz decomposition gr_l = sum of N^k P_{l+2k}, and the raising operator
completing gr(N) to an sl2 triple on gr W.  It also checks strictness of the
powers of N against an auxiliary increasing filtration F and the induced
filtered Lefschetz decomposition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exactcore import (
    ExactMatrix,
    Flag,
    ONE,
    Subspace,
    ZERO,
    commutator,
    invert,
    kernel,
    solve,
)


class NotNilpotent(ValueError):
    pass


class NegativeIndex(ValueError):
    pass


class StrictnessPrereqFailed(ValueError):
    pass


@dataclass(frozen=True)
class NilpotentEndo:
    """A nilpotent matrix together with its nilpotency index."""

    matrix: ExactMatrix
    nilpotency_index: int

    @property
    def dim(self) -> int:
        return self.matrix.rows


def nilpotent(matrix: ExactMatrix) -> NilpotentEndo:
    """Wrap a matrix, computing the smallest k with matrix^k = 0."""
    if not matrix.is_square():
        raise NotNilpotent("operator matrix must be square")
    n = matrix.rows
    power = ExactMatrix.identity(n)
    for k in range(n + 1):
        if power.is_zero():
            return NilpotentEndo(matrix, k)
        power = power * matrix
    if power.is_zero():
        return NilpotentEndo(matrix, n)
    raise NotNilpotent("matrix is not nilpotent")


@dataclass(frozen=True)
class CenteredFiltration:
    """The monodromy weight filtration of a nilpotent operator."""

    flag: Flag

    def piece(self, l: int) -> Subspace:
        return self.flag.piece(l)

    def gr_dim(self, l: int) -> int:
        return self.flag.piece(l).dim - self.flag.piece(l - 1).dim

    def weights(self) -> list:
        lo, hi = self.flag.support()
        return [l for l in range(lo, hi + 1) if self.gr_dim(l) != 0]


@dataclass(frozen=True)
class FilteredOperator:
    """A nilpotent operator N with an increasing filtration F, N F_b <= F_{b+1}."""

    hodge_flag: Flag
    op: NilpotentEndo

    def __post_init__(self):
        n = self.op.matrix
        lo, hi = self.hodge_flag.support()
        for b in range(lo - 1, hi + 1):
            fb = self.hodge_flag.piece(b)
            if not self.hodge_flag.piece(b + 1).contains(fb.image_under(n)):
                raise ValueError(f"operator does not map F_{b} into F_{b + 1}")

    @property
    def space_dim(self) -> int:
        return self.op.dim


def _iterated_kernels(n: NilpotentEndo) -> list:
    """[ker N^0, ker N^1, ..., ker N^index] as subspaces."""
    kers = [Subspace.zero(n.dim)]
    power = ExactMatrix.identity(n.dim)
    for _ in range(n.nilpotency_index):
        power = power * n.matrix
        kers.append(kernel(power))
    return kers


def monodromy_filtration(n: NilpotentEndo) -> CenteredFiltration:
    """The unique centered weight filtration of n.

    Built from the closed form W_k = sum over j >= max(0,-k) of
    N^j (ker N^{k+2j+1}); both defining axioms are re-verified before
    returning, so a construction bug cannot escape silently.
    """
    d = n.dim
    h = n.nilpotency_index
    kers = _iterated_kernels(n)

    def ker_power(j):
        if j <= 0:
            return Subspace.zero(d)
        if j >= len(kers):
            return Subspace.full(d)
        return kers[j]

    powers = [ExactMatrix.identity(d)]
    for _ in range(h + 1):
        powers.append(powers[-1] * n.matrix)

    pieces = {}
    for k in range(-h, h + 1):
        acc = Subspace.zero(d)
        for j in range(max(0, -k), h + 1):
            acc = acc.add(ker_power(k + 2 * j + 1).image_under(powers[j]))
        pieces[k] = acc
    flag = Flag(d, pieces)
    filt = CenteredFiltration(flag)
    _verify_weight_axioms(n, filt)
    return filt


def _verify_weight_axioms(n: NilpotentEndo, filt: CenteredFiltration):
    lo, hi = filt.flag.support()
    for l in range(lo, hi + 1):
        w_l = filt.piece(l)
        if not filt.piece(l - 2).contains(w_l.image_under(n.matrix)):
            raise AssertionError(f"N does not map W_{l} into W_{l - 2}")
    graded = WeightGraded(n, filt)
    for l in range(0, hi + 1):
        m = graded.induced_power(l, l)
        if m.rows != m.cols or m.rank() != m.rows:
            raise AssertionError(f"N^{l}: gr_{l} -> gr_{-l} is not an isomorphism")


class WeightGraded:
    """Coordinates on gr^W with induced maps between graded pieces.

    Each graded piece gr_l gets the basis lifted by Subspace.quotient_basis,
    so all induced maps below are exact matrices in those bases.
    """

    def __init__(self, n: NilpotentEndo, filt: CenteredFiltration):
        self.n = n
        self.filt = filt
        lo, hi = filt.flag.support()
        self.lo, self.hi = lo, hi
        self.lifts = {}
        for l in range(lo, hi + 1):
            cols = filt.piece(l).quotient_basis(filt.piece(l - 1))
            self.lifts[l] = ExactMatrix.from_cols(n.dim, cols)

    def weights(self):
        return [l for l in range(self.lo, self.hi + 1) if self.lifts[l].cols]

    def dim(self, l: int) -> int:
        lift = self.lifts.get(l)
        return lift.cols if lift is not None else 0

    def coords(self, l: int, vec) -> list:
        """Coordinates of a vector of W_l in gr_l (reduce mod W_{l-1})."""
        lift = self.lifts.get(l)
        below = self.filt.piece(l - 1)
        cols = (lift.columns() if lift is not None else []) + below.basis.columns()
        if not cols:
            if any(v for v in vec):
                raise ValueError("vector not in W_l")
            return []
        m = ExactMatrix.from_cols(self.n.dim, cols)
        x = solve(m, vec)
        if x is None:
            raise ValueError("vector not in W_l")
        return x[: self.dim(l)]

    def induced_map(self, matrix: ExactMatrix, src: int, dst: int) -> ExactMatrix:
        """matrix : gr_src -> gr_dst in the lifted bases (must be well defined)."""
        from .exactcore import solve_many

        lift = self.lifts.get(src)
        if lift is None or lift.cols == 0:
            return ExactMatrix.zeros(self.dim(dst), 0)
        dst_lift = self.lifts.get(dst)
        below = self.filt.piece(dst - 1)
        cols = (dst_lift.columns() if dst_lift is not None else []) + below.basis.columns()
        images = matrix * lift
        if not cols:
            if not images.is_zero():
                raise ValueError("image does not land in the graded piece")
            return ExactMatrix.zeros(0, lift.cols)
        solver = ExactMatrix.from_cols(self.n.dim, cols)
        x = solve_many(solver, images)
        if x is None:
            raise ValueError("image does not land in the graded piece")
        d_dst = self.dim(dst)
        return ExactMatrix(x.data[:d_dst], _cols=lift.cols) if d_dst else ExactMatrix.zeros(0, lift.cols)

    def induced_power(self, l: int, a: int) -> ExactMatrix:
        """Induced N^a : gr_l -> gr_{l-2a}."""
        return self.induced_map(self.n.matrix.power(a), l, l - 2 * a)

    def gr_n(self) -> dict:
        """Induced N on every graded piece: {l: matrix gr_l -> gr_{l-2}}."""
        return {l: self.induced_power(l, 1) for l in self.weights()}


@dataclass(frozen=True)
class PrimitivePart:
    """P_l inside gr_l, with the dimension of the quotient presentation."""

    weight: int
    subspace: Subspace  # in gr_l coordinates
    quotient_dim: int

    @property
    def dim(self) -> int:
        return self.subspace.dim


def primitive_part(n: NilpotentEndo, l: int, graded: WeightGraded | None = None) -> PrimitivePart:
    """P_l = ker(N^{l+1} on gr_l); also checks the quotient presentation
    ker N^{l+1} / (ker N^l + im N . ker N^{l+1}) has the same dimension."""
    if l < 0:
        raise NegativeIndex("primitive parts are indexed by l >= 0")
    if graded is None:
        graded = WeightGraded(n, monodromy_filtration(n))
    m = graded.induced_power(l, l + 1)
    sub = kernel(m) if graded.dim(l) else Subspace.zero(0)

    kers = _iterated_kernels(n)

    def kp(j):
        if j <= 0:
            return Subspace.zero(n.dim)
        if j >= len(kers):
            return Subspace.full(n.dim)
        return kers[j]

    im_n = Subspace.full(n.dim).image_under(n.matrix)
    denom = kp(l).add(im_n.intersect(kp(l + 1)))
    qdim = kp(l + 1).dim - kp(l + 1).intersect(denom).dim
    if qdim != sub.dim:
        raise AssertionError(
            f"primitive part presentations disagree at weight {l}: {sub.dim} vs {qdim}"
        )
    return PrimitivePart(l, sub, qdim)


@dataclass(frozen=True)
class LefschetzDecomposition:
    """gr_l = direct sum over k of N^k P_{l+2k}, with a direct-sum certificate."""

    graded: WeightGraded
    primitives: dict  # l >= 0 -> PrimitivePart
    summands: dict  # l -> list of (k, Subspace in gr_l coords)

    def gr_dims(self) -> dict:
        return {l: self.graded.dim(l) for l in self.graded.weights()}

    def primitive_dims(self) -> dict:
        return {l: p.dim for l, p in self.primitives.items() if p.dim}


def lefschetz_decomposition(n: NilpotentEndo) -> LefschetzDecomposition:
    graded = WeightGraded(n, monodromy_filtration(n))
    hi = graded.hi
    primitives = {l: primitive_part(n, l, graded) for l in range(0, hi + 1)}
    summands = {}
    for l in range(graded.lo, graded.hi + 1):
        d_l = graded.dim(l)
        parts = []
        total = 0
        seen = Subspace.zero(d_l)
        for k in range(max(0, -l), hi + 1):
            p = primitives.get(l + 2 * k)
            if p is None or p.dim == 0:
                continue
            down = graded.induced_power(l + 2 * k, k)
            img = p.subspace.image_under(down)
            if img.dim != p.dim:
                raise AssertionError(f"N^{k} is not injective on P_{l + 2 * k}")
            if not seen.intersect(img).is_zero():
                raise AssertionError(f"summands of gr_{l} are not independent")
            seen = seen.add(img)
            total += img.dim
            parts.append((k, img))
        if total != d_l:
            raise AssertionError(f"Lefschetz summands of gr_{l} have wrong total dim")
        summands[l] = parts
    return LefschetzDecomposition(graded, primitives, summands)


@dataclass(frozen=True)
class Sl2Data:
    """The sl2 triple on gr^W in the concatenated graded basis.

    Basis order: graded pieces by increasing weight, each in its lifted
    quotient basis.  X raises weight by 2, Y is the induced N, H is the
    weight grading; [X,Y] = H, [H,X] = 2X, [H,Y] = -2Y hold exactly.
    """

    weights: tuple
    offsets: dict
    X: ExactMatrix
    Y: ExactMatrix
    H: ExactMatrix


def sl2_complete(n: NilpotentEndo) -> Sl2Data:
    """Complete gr(N) to an sl2 triple via X N^k = k(l-k+1) N^{k-1} on
    strings through the primitive parts."""
    dec = lefschetz_decomposition(n)
    graded = dec.graded
    weights = [l for l in range(graded.lo, graded.hi + 1)]
    dims = {l: graded.dim(l) for l in weights}
    offsets = {}
    total = 0
    for l in weights:
        offsets[l] = total
        total += dims[l]

    # string basis: for each primitive p in P_l (l >= 0) and 0 <= k <= l the
    # vector N^k p sits in gr_{l-2k}
    string_cols = {l: [] for l in weights}  # gr-coordinate columns per weight
    string_tags = {l: [] for l in weights}  # (top weight l0, k, index in P_l0)
    for l0 in sorted(dec.primitives):
        p = dec.primitives[l0]
        if p.dim == 0:
            continue
        for idx, col in enumerate(p.subspace.basis.columns()):
            vec = col
            for k in range(0, l0 + 1):
                w = l0 - 2 * k
                string_cols[w].append(vec)
                string_tags[w].append((l0, k, idx))
                if k < l0:
                    vec = graded.induced_power(w, 1).apply(vec)

    # change of basis per weight: columns are the string vectors
    trans = {}
    for l in weights:
        if dims[l] == 0:
            trans[l] = ExactMatrix.zeros(0, 0)
            continue
        t = ExactMatrix.from_cols(dims[l], string_cols[l])
        if t.rank() != dims[l]:
            raise AssertionError("string basis does not span a graded piece")
        trans[l] = t

    x_entries = [[ZERO] * total for _ in range(total)]
    for l in weights:
        if dims[l] == 0:
            continue
        # X on string vectors of weight l: N^k p -> k(l0-k+1) N^{k-1} p
        target_cols = []
        for (l0, k, idx) in string_tags[l]:
            if k == 0:
                target_cols.append([ZERO] * dims[l + 2] if dims.get(l + 2) else [])
                continue
            src_pos = string_tags[l + 2].index((l0, k - 1, idx))
            coeff = k * (l0 - k + 1)
            col = [ZERO] * len(string_tags[l + 2])
            col[src_pos] = ONE * coeff
            target_cols.append(col)
        up = dims.get(l + 2, 0)
        # columns are in the string basis of weight l+2; convert both ends
        if up:
            x_string = ExactMatrix.from_cols(up, [c if c else [ZERO] * up for c in target_cols])
            x_gr = trans[l + 2] * x_string * invert(trans[l])
        else:
            x_gr = ExactMatrix.zeros(0, dims[l])
        for i in range(x_gr.rows):
            for j in range(x_gr.cols):
                x_entries[offsets[l + 2] + i][offsets[l] + j] = x_gr.data[i][j]

    y_entries = [[ZERO] * total for _ in range(total)]
    for l in weights:
        if dims[l] == 0 or dims.get(l - 2, 0) == 0:
            continue
        block = graded.induced_power(l, 1)
        for i in range(block.rows):
            for j in range(block.cols):
                y_entries[offsets[l - 2] + i][offsets[l] + j] = block.data[i][j]

    h_entries = [[ZERO] * total for _ in range(total)]
    for l in weights:
        for j in range(dims[l]):
            h_entries[offsets[l] + j][offsets[l] + j] = ONE * l

    X = ExactMatrix(x_entries) if total else ExactMatrix.zeros(0, 0)
    Y = ExactMatrix(y_entries) if total else ExactMatrix.zeros(0, 0)
    H = ExactMatrix(h_entries) if total else ExactMatrix.zeros(0, 0)
    if not commutator(X, Y) == H:
        raise AssertionError("[X,Y] != H")
    if not commutator(H, X) == X.scale(2):
        raise AssertionError("[H,X] != 2X")
    if not commutator(H, Y) == Y.scale(-2):
        raise AssertionError("[H,Y] != -2Y")
    return Sl2Data(tuple(weights), offsets, X, Y, H)


# ---------------------------------------------------------------------------
# strictness and the filtered Lefschetz decomposition


def check_strictness(fo: FilteredOperator, a: int, b: int) -> bool:
    """N^a F_b == F_{a+b} . N^a V, both sides as exact subspaces."""
    if a < 0:
        raise ValueError("a must be >= 0")
    n_a = fo.op.matrix.power(a)
    lhs = fo.hodge_flag.piece(b).image_under(n_a)
    rhs = fo.hodge_flag.piece(a + b).intersect(Subspace.full(fo.space_dim).image_under(n_a))
    return lhs == rhs


def check_strictness_all(fo: FilteredOperator) -> bool:
    """Strictness for all a in [0, nilpotency index] and b spanning the
    finite support of F; outside that range both sides stabilize."""
    lo, hi = fo.hodge_flag.support()
    for a in range(0, fo.op.nilpotency_index + 1):
        for b in range(lo, hi + 1):
            if not check_strictness(fo, a, b):
                return False
    return True


@dataclass(frozen=True)
class FilteredLefschetzReport:
    passed: bool
    failures: tuple  # tuples (r, level, lhs_dim, rhs_dim)
    iso_failures: tuple  # tuples (r, level) where N^r fails on F gr


def check_filtered_lefschetz(fo: FilteredOperator) -> FilteredLefschetzReport:
    """Verify dimension-by-dimension that the Lefschetz decomposition of
    gr^W respects the induced filtration, assuming strictness holds.

    Also asserts the filtered isomorphisms N^r : F_l gr_r -> F_{l+r} gr_{-r}
    (dimension equality plus injectivity of the induced map).
    """
    if not check_strictness_all(fo):
        raise StrictnessPrereqFailed("some power of the operator is not strict")
    n = fo.op
    filt = monodromy_filtration(n)
    graded = WeightGraded(n, filt)
    dec = lefschetz_decomposition(n)
    flo, fhi = fo.hodge_flag.support()

    def f_gr_dim(level, r):
        f = fo.hodge_flag.piece(level)
        return f.intersect(filt.piece(r)).dim - f.intersect(filt.piece(r - 1)).dim

    def f_in_gr(level, r):
        """Image of F_level . W_r in gr_r coordinates."""
        inter = fo.hodge_flag.piece(level).intersect(filt.piece(r))
        cols = [graded.coords(r, c) for c in inter.basis.columns()]
        return Subspace.from_columns(graded.dim(r), cols)

    failures = []
    iso_failures = []
    for r in range(graded.lo, graded.hi + 1):
        for level in range(flo, fhi + 1):
            lhs = f_gr_dim(level, r)
            rhs = 0
            for k in range(max(0, -r), graded.hi + 1):
                p = dec.primitives.get(r + 2 * k)
                if p is None or p.dim == 0:
                    continue
                fp = f_in_gr(level - k, r + 2 * k).intersect(p.subspace)
                down = graded.induced_power(r + 2 * k, k)
                rhs += fp.image_under(down).dim
            if lhs != rhs:
                failures.append((r, level, lhs, rhs))
    for r in range(0, graded.hi + 1):
        down = graded.induced_power(r, r)
        for level in range(flo, fhi + 1):
            src = f_in_gr(level, r)
            dst = f_in_gr(level + r, -r)
            img = src.image_under(down)
            if img.dim != src.dim or img != dst:
                iso_failures.append((r, level))
    return FilteredLefschetzReport(
        passed=not failures and not iso_failures,
        failures=tuple(failures),
        iso_failures=tuple(iso_failures),
    )
