"""Verification of (polarized, bigraded) Hodge-Lefschetz structures.

A Hodge structure of weight n on V is a pair of decreasing flags F, G with
V = F^p + G^{n+1-p} (direct) for every p.  A polarization is a nondegenerate
Hermitian pairing S with F^p orthogonal to G^{n+1-p} and (-1)^q S positive
definite on each piece V^{p,q} = F^p . G^q.  Pairings are stored as matrices
against the fixed basis, sesquilinear in the second argument:

    S(a, b) = a^T M conj(b),   Hermitian:  S(a, b) = conj(S(b, a)).

The bigraded objects carry two commuting operators, X1 of bidegree (+2, 0)
raising the filtration and Y2 of bidegree (0, -2) lowering it, with the
block pairing family S_{l,k} : V_{l,k} x conj(V_{-l,-k}) -> C subject to
S_{-l,-k}(b, a) = conj(S_{l,k}(a, b)).
"""

from __future__ import annotations

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
    kernel,
    matrix_from_json,
    matrix_to_json,
    solve,
)


class DegeneratePairing(ValueError):
    pass


class NotNilpotent(ValueError):
    pass


class VerificationFailed(ValueError):
    pass


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    failures: tuple  # tuples (condition, location, message)

    def __bool__(self):
        return self.ok


def _pairing_value(m: ExactMatrix, a, b):
    acc = ZERO
    for i, ai in enumerate(a):
        if not ai:
            continue
        row = m.data[i]
        for j, bj in enumerate(b):
            if bj and row[j]:
                acc = acc + ai * row[j] * bj.conj()
    return acc


def restrict_pairing(m: ExactMatrix, left_basis: ExactMatrix, right_basis: ExactMatrix) -> ExactMatrix:
    """Matrix of S on chosen bases of the two slots: B_l^T M conj(B_r)."""
    return left_basis.transpose() * m * right_basis.conj()


# ---------------------------------------------------------------------------
# plain Hodge structures


@dataclass(frozen=True)
class HodgeStructure:
    """(V, F, G) with both flags decreasing, V = F^p + G^{n+1-p} for all p."""

    space_dim: int
    weight: int
    F: Flag  # decreasing: F^p = F.dec_piece(p)
    G: Flag

    def piece(self, p: int, q: int) -> Subspace:
        return self.F.dec_piece(p).intersect(self.G.dec_piece(q))


def _dec_range(flag: Flag) -> range:
    lo, hi = flag.support()
    return range(-hi, -lo + 2)  # p values where something can change, plus one


def hs_verify(h: HodgeStructure) -> VerifyResult:
    """Direct-sum condition at every p, and equivalence with the (p,q)
    decomposition (pieces sum to V with the right dimensions)."""
    failures = []
    n = h.weight
    ps = set(_dec_range(h.F)) | {n + 1 - q for q in _dec_range(h.G)}
    for p in sorted(ps):
        f = h.F.dec_piece(p)
        g = h.G.dec_piece(n + 1 - p)
        if f.add(g).dim != h.space_dim or not f.intersect(g).is_zero():
            failures.append(("direct-sum", p, f"F^{p} + G^{n + 1 - p} is not a direct sum"))
    total = 0
    sum_space = Subspace.zero(h.space_dim)
    for p in sorted(set(_dec_range(h.F)) | {n - q for q in _dec_range(h.G)}):
        piece = h.piece(p, n - p)
        total += piece.dim
        sum_space = sum_space.add(piece)
    if total != h.space_dim or sum_space.dim != h.space_dim:
        failures.append(("pq-decomposition", None, "V is not the sum of its (p,q) pieces"))
    return VerifyResult(not failures, tuple(failures))


# ---------------------------------------------------------------------------
# polarized Hodge structures


@dataclass(frozen=True)
class PolarizedHS:
    """(V, F, S): the conjugate flag G is recovered from the pairing."""

    space_dim: int
    weight: int
    F: Flag
    S: ExactMatrix


def phs_recover_G(p: PolarizedHS) -> Flag:
    """G^{n+1-q'} ... : G^{n+1-p} = {a : S(a, b) = 0 for all b in F^p}."""
    if p.S.det().is_zero():
        raise DegeneratePairing("pairing matrix is singular")
    n = p.weight
    pieces = {}
    for pp in _dec_range(p.F):
        f = p.F.dec_piece(pp)
        if f.dim == 0:
            g = Subspace.full(p.space_dim)
        else:
            # a^T S conj(B) = 0  <=>  (S conj(B))^T a = 0
            m = (p.S * f.basis.conj()).transpose()
            g = kernel(m)
        pieces[n + 1 - pp] = g
    return Flag.from_decreasing(p.space_dim, pieces)


def phs_verify(p: PolarizedHS) -> VerifyResult:
    """Hermitian + orthogonality + positivity, with a certificate naming the
    first failing (p,q) when positivity breaks."""
    failures = []
    if p.S.rows != p.space_dim or p.S.cols != p.space_dim:
        return VerifyResult(False, (("shape", None, "pairing matrix has wrong shape"),))
    if p.S != p.S.conj_t():
        failures.append(("hermitian", None, "S is not Hermitian"))
        return VerifyResult(False, tuple(failures))
    if p.space_dim and p.S.det().is_zero():
        failures.append(("nondegenerate", None, "S is degenerate"))
        return VerifyResult(False, tuple(failures))
    n = p.weight
    G = phs_recover_G(p)
    h = HodgeStructure(p.space_dim, n, p.F, G)
    sub = hs_verify(h)
    if not sub.ok:
        failures.extend(sub.failures)
    for pp in _dec_range(p.F):
        f = p.F.dec_piece(pp)
        g = G.dec_piece(n + 1 - pp)
        for a in f.basis.columns():
            for b in g.basis.columns():
                if not _pairing_value(p.S, a, b).is_zero():
                    failures.append(("orthogonality", pp, f"F^{pp} not orthogonal to G^{n + 1 - pp}"))
                    break
    for pp in sorted(_dec_range(p.F)):
        q = n - pp
        piece = h.piece(pp, q)
        if piece.dim == 0:
            continue
        mat = restrict_pairing(p.S, piece.basis, piece.basis)
        signed = mat if q % 2 == 0 else -mat
        try:
            good = hermitian_positive_definite(signed)
        except Exception:
            good = False
        if not good:
            failures.append(("positivity", (pp, q), f"(-1)^{q} S is not positive on V^{pp},{q}"))
    return VerifyResult(not failures, tuple(failures))


def tate_twist(p: PolarizedHS, r: int) -> PolarizedHS:
    """(V, F^{.+r}, (-1)^r S) of weight lowered by 2r; an involution when
    composed with the opposite twist."""
    return PolarizedHS(
        p.space_dim,
        p.weight - 2 * r,
        p.F.shift(r),
        p.S if r % 2 == 0 else -p.S,
    )


# ---------------------------------------------------------------------------
# sl2 utilities: Weil element and completing a raising operator


def weil_element(X: ExactMatrix, Y: ExactMatrix) -> ExactMatrix:
    """w = exp(X) exp(-Y) exp(X) for an sl2 pair of nilpotent matrices.

    Verifies w H w^{-1} = -H, w X w^{-1} = -Y and w Y w^{-1} = -X where
    H = [X, Y]; raises if (X, Y, H) do not close into an sl2 triple.
    """
    try:
        ex = exp_nilpotent(X)
        ey = exp_nilpotent(-Y)
    except ValueError as exc:
        raise NotNilpotent(str(exc))
    H = commutator(X, Y)
    if commutator(H, X) != X.scale(2) or commutator(H, Y) != Y.scale(-2):
        raise ValueError("X, Y do not generate an sl2 triple")
    w = ex * ey * ex
    w_inv = exp_nilpotent(-X) * exp_nilpotent(Y) * exp_nilpotent(-X)
    if w * w_inv != ExactMatrix.identity(X.rows):
        raise AssertionError("Weil element is not invertible")
    if w * H != -H * w or w * X != -Y * w or w * Y != -X * w:
        raise AssertionError("Weil conjugation identities fail")
    return w


def lowering_partner(weights, X: ExactMatrix) -> ExactMatrix:
    """The unique Y completing a graded raising operator to an sl2 triple.

    ``weights`` assigns an integer weight to every basis index; X must raise
    the weight by exactly 2 and satisfy the representation axioms.  Y acts on
    strings through the lowest-weight vectors by Y X^j b = j(l-j+1) X^{j-1} b
    where -l is the weight of the bottom vector b.
    """
    dim = X.rows
    if dim == 0:
        return ExactMatrix.zeros(0, 0)
    weights = list(weights)
    levels = sorted(set(weights))
    coord = {
        w: Subspace.from_columns(
            dim, [[ONE if i == j else ZERO for i in range(dim)] for j in range(dim) if weights[j] == w]
        )
        for w in levels
    }
    # bottoms at weight w: complement of X(V_{w-2}) inside V_w
    strings = []  # (bottom weight w, [vectors X^j b])
    for w in levels:
        below = coord.get(w - 2, Subspace.zero(dim))
        image = below.image_under(X)
        bottoms = coord[w].quotient_basis(image)
        for b in bottoms:
            l = -w
            if l < 0:
                raise ValueError("positive-weight bottom: not a representation")
            chain = [b]
            vec = b
            for _ in range(l):
                vec = X.apply(vec)
                chain.append(vec)
            if any(v for v in X.apply(chain[-1])):
                raise ValueError("string does not terminate: not a representation")
            strings.append((w, chain))
    # assemble Y via the string basis
    cols_by_weight = {w: [] for w in levels}
    tags_by_weight = {w: [] for w in levels}
    for s_idx, (w, chain) in enumerate(strings):
        for j, vec in enumerate(chain):
            cw = w + 2 * j
            cols_by_weight[cw].append(vec)
            tags_by_weight[cw].append((s_idx, j))
    y_cols = [None] * dim
    for w in levels:
        cols = cols_by_weight[w]
        indices = [i for i in range(dim) if weights[i] == w]
        if len(cols) != len(indices):
            raise ValueError("strings do not span a graded piece")
        t = ExactMatrix.from_cols(dim, cols)
        targets = []
        for s_idx, j in tags_by_weight[w]:
            bw, chain = strings[s_idx]
            l = -bw
            targets.append(
                [x * (j * (l - j + 1)) for x in chain[j - 1]] if j > 0 else [ZERO] * dim
            )
        # coordinates of the block basis vectors in the string basis
        e_cols = ExactMatrix.from_cols(
            dim, [[ONE if i == bi else ZERO for i in range(dim)] for bi in indices]
        )
        from .exactcore import solve_many

        coords = solve_many(t, e_cols)
        if coords is None:
            raise ValueError("strings do not span a graded piece")
        for col_idx, basis_index in enumerate(indices):
            out = [ZERO] * dim
            for pos in range(len(cols)):
                coeff = coords.data[pos][col_idx]
                if coeff:
                    out = [o + coeff * tv for o, tv in zip(out, targets[pos])]
            y_cols[basis_index] = out
    Y = ExactMatrix.from_cols(dim, y_cols)
    H = ExactMatrix.diagonal([ONE * w for w in weights])
    if commutator(X, Y) != H:
        raise AssertionError("[X, Y] != H after completion")
    return Y


# ---------------------------------------------------------------------------
# bigraded structures


class BigradedHL:
    """A bigraded filtered space with operators X1, Y2 and block pairings.

    The total basis concatenates the pieces in lexicographic (l, k) order.
    ``S`` maps (l, k) to the matrix of S_{l,k} : V_{l,k} x conj(V_{-l,-k}).
    """

    __slots__ = ("n", "pieces", "order", "offsets", "X1", "Y2", "F", "S")

    def __init__(self, n: int, pieces: dict, X1: ExactMatrix, Y2: ExactMatrix, F: Flag, S: dict):
        order = tuple(sorted((lk, d) for lk, d in pieces.items() if d))
        offsets = {}
        total = 0
        for lk, d in order:
            offsets[lk] = total
            total += d
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "pieces", dict(order))
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "X1", X1)
        object.__setattr__(self, "Y2", Y2)
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "S", dict(S))
        if X1.shape != (total, total) or Y2.shape != (total, total):
            raise ValueError("operator shape does not match total dimension")
        if F.ambient != total:
            raise ValueError("filtration ambient does not match total dimension")

    def __setattr__(self, name, value):
        raise AttributeError("BigradedHL is immutable")

    @property
    def total_dim(self) -> int:
        return sum(self.pieces.values())

    def dim(self, lk) -> int:
        return self.pieces.get(tuple(lk), 0)

    def block(self, m: ExactMatrix, src, dst) -> ExactMatrix:
        """The (dst <- src) block of a total-space matrix."""
        src, dst = tuple(src), tuple(dst)
        ds, dd = self.dim(src), self.dim(dst)
        if ds == 0 or dd == 0:
            return ExactMatrix.zeros(dd, ds)
        o_s, o_d = self.offsets[src], self.offsets[dst]
        return ExactMatrix(
            [[m.data[o_d + i][o_s + j] for j in range(ds)] for i in range(dd)]
        )

    def piece_subspace(self, lk) -> Subspace:
        lk = tuple(lk)
        d = self.dim(lk)
        if d == 0:
            return Subspace.zero(self.total_dim)
        o = self.offsets[lk]
        cols = []
        for j in range(d):
            v = [ZERO] * self.total_dim
            v[o + j] = ONE
            cols.append(v)
        return Subspace.from_columns(self.total_dim, cols)

    def f_in_piece(self, p: int, lk) -> Subspace:
        """F^p . V_{l,k} in block coordinates."""
        lk = tuple(lk)
        d = self.dim(lk)
        if d == 0:
            return Subspace.zero(0)
        inter = self.F.dec_piece(p).intersect(self.piece_subspace(lk))
        o = self.offsets[lk]
        cols = [c[o : o + d] for c in inter.basis.columns()]
        return Subspace.from_columns(d, cols)

    def pairing(self, lk) -> ExactMatrix:
        lk = tuple(lk)
        return self.S.get(lk, ExactMatrix.zeros(self.dim(lk), self.dim((-lk[0], -lk[1]))))

    def f_support(self) -> range:
        return _dec_range(self.F)

    # -- serialization

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "pieces": [{"l": l, "k": k, "dim": d} for (l, k), d in self.order],
            "X1": matrix_to_json(self.X1),
            "Y2": matrix_to_json(self.Y2),
            "F": [
                {"p": -key, "basis": matrix_to_json(sub.basis)}
                for key, sub in self.F.steps
            ],
            "S": [
                {"l": l, "k": k, "matrix": matrix_to_json(m)}
                for (l, k), m in sorted(self.S.items())
            ],
        }

    @staticmethod
    def from_json(obj: dict) -> "BigradedHL":
        pieces = {(p["l"], p["k"]): p["dim"] for p in obj["pieces"]}
        total = sum(pieces.values())
        f_pieces = {
            item["p"]: Subspace.from_columns(total, matrix_from_json(item["basis"]))
            for item in obj["F"]
        }
        flag = Flag.from_decreasing(total, f_pieces) if f_pieces else Flag.trivial(total)
        s = {(item["l"], item["k"]): matrix_from_json(item["matrix"]) for item in obj["S"]}
        return BigradedHL(
            obj["n"], pieces, matrix_from_json(obj["X1"]), matrix_from_json(obj["Y2"]), flag, s
        )


def _structure_failures(b: BigradedHL) -> list:
    failures = []
    total = b.total_dim
    # degree bookkeeping: X1 only (l,k)->(l+2,k), Y2 only (l,k)->(l,k-2)
    for src, _ in b.order:
        for dst, _ in b.order:
            blk = b.block(b.X1, src, dst)
            if not blk.is_zero() and dst != (src[0] + 2, src[1]):
                failures.append(("degree", ("X1", src, dst), "X1 has an off-degree block"))
            blk = b.block(b.Y2, src, dst)
            if not blk.is_zero() and dst != (src[0], src[1] - 2):
                failures.append(("degree", ("Y2", src, dst), "Y2 has an off-degree block"))
    if commutator(b.X1, b.Y2) != ExactMatrix.zeros(total, total):
        failures.append(("commute", None, "[X1, Y2] != 0"))
    # filtration compatibility
    for p in b.f_support():
        f = b.F.dec_piece(p)
        if not b.F.dec_piece(p + 1).contains(f.image_under(b.X1)):
            failures.append(("filtration", ("X1", p), "X1 F^p not inside F^{p+1}"))
        if not b.F.dec_piece(p - 1).contains(f.image_under(b.Y2)):
            failures.append(("filtration", ("Y2", p), "Y2 F^p not inside F^{p-1}"))
    return failures


def pbhl_verify(b: BigradedHL) -> VerifyResult:
    """Check (pbHL1) filtered isomorphisms, (pbHL2) adjointness and support,
    (pbHL3) positivity on every bi-primitive part, with certificates."""
    failures = list(_structure_failures(b))

    levels_l = sorted({lk[0] for lk, _ in b.order})
    levels_k = sorted({lk[1] for lk, _ in b.order})
    f_ps = list(b.f_support())

    # pbHL1
    for l in [x for x in levels_l if x >= 0]:
        for k in levels_k:
            src, dst = (-l, k), (l, k)
            if b.dim(src) != b.dim(dst):
                failures.append(("pbHL1", ("X1", l, k), "graded dims differ"))
                continue
            blk = b.block(b.X1.power(l), src, dst)
            if b.dim(src) and blk.rank() != b.dim(src):
                failures.append(("pbHL1", ("X1", l, k), f"X1^{l} not bijective on V_({-l},{k})"))
                continue
            for p in f_ps:
                img = b.f_in_piece(p, src).image_under(blk)
                if img != b.f_in_piece(p + l, dst):
                    failures.append(
                        ("pbHL1", ("X1", l, k, p), f"X1^{l} F^{p} V_({-l},{k}) != F^{p + l} V_({l},{k})")
                    )
    for k in [x for x in levels_k if x >= 0]:
        for l in levels_l:
            src, dst = (l, k), (l, -k)
            if b.dim(src) != b.dim(dst):
                failures.append(("pbHL1", ("Y2", l, k), "graded dims differ"))
                continue
            blk = b.block(b.Y2.power(k), src, dst)
            if b.dim(src) and blk.rank() != b.dim(src):
                failures.append(("pbHL1", ("Y2", l, k), f"Y2^{k} not bijective on V_({l},{k})"))
                continue
            for p in f_ps:
                img = b.f_in_piece(p, src).image_under(blk)
                if img != b.f_in_piece(p - k, dst):
                    failures.append(
                        ("pbHL1", ("Y2", l, k, p), f"Y2^{k} F^{p} V_({l},{k}) != F^{p - k} V_({l},{-k})")
                    )

    # pbHL2: Hermitian symmetry, nondegeneracy, adjointness
    for lk, d in b.order:
        neg = (-lk[0], -lk[1])
        m = b.pairing(lk)
        if m.shape != (d, b.dim(neg)):
            failures.append(("pbHL2", lk, "pairing block has wrong shape"))
            continue
        if b.dim(neg) != d or (d and m.det().is_zero()):
            failures.append(("pbHL2", lk, "pairing block is degenerate"))
        if m != b.pairing(neg).conj_t():
            failures.append(("pbHL2", lk, "Hermitian symmetry fails"))
    for lk, _ in b.order:
        l, k = lk
        dst = (l + 2, k)
        if b.dim(dst):
            # S_{l+2,k}(X1 a, b) = S_{l,k}(a, X1 b) for a in V_{l,k}, b in V_{-l-2,-k}
            a_blk = b.block(b.X1, lk, dst)
            b_blk = b.block(b.X1, (-l - 2, -k), (-l, -k))
            lhs = a_blk.transpose() * b.pairing(dst)
            rhs = b.pairing(lk) * b_blk.conj()
            if lhs != rhs:
                failures.append(("pbHL2", ("X1", lk), "X1 is not self-adjoint for S"))
        dst = (l, k - 2)
        if b.dim(dst):
            # S_{l,k}(a, Y2 b) = S_{l,k-2}(Y2 a, b) for a in V_{l,k}, b in V_{-l,-k+2}
            a_blk = b.block(b.Y2, lk, dst)
            b_blk = b.block(b.Y2, (-l, -k + 2), (-l, -k))
            lhs = b.pairing(lk) * b_blk.conj()
            rhs = a_blk.transpose() * b.pairing(dst)
            if lhs != rhs:
                failures.append(("pbHL2", ("Y2", lk), "Y2 is not self-adjoint for S"))

    # pbHL3: positivity on bi-primitives
    for l in [x for x in levels_l if x >= 0]:
        for k in [x for x in levels_k if x >= 0]:
            src = (-l, k)
            d = b.dim(src)
            if d == 0:
                continue
            x_pow = b.block(b.X1.power(l + 1), src, (l + 2, k))
            y_pow = b.block(b.Y2.power(k + 1), src, (-l, -k - 2))
            prim = kernel(x_pow.vstack(y_pow))
            if prim.dim == 0:
                continue
            a_blk = b.block(b.X1.power(l), src, (l, k))
            y_blk = b.block(b.Y2.power(k), src, (-l, -k))
            sign = -1 if k % 2 else 1
            t_full = a_blk.transpose() * b.pairing((l, k)) * y_blk.conj().scale(sign)
            t = restrict_pairing_block(t_full, prim.basis)
            f_pieces = {}
            for p in b.f_support():
                f_pieces[p] = _restrict_subspace(b.f_in_piece(p, src), prim)
            flag = Flag.from_decreasing(prim.dim, f_pieces)
            phs = PolarizedHS(prim.dim, b.n - l + k, flag, t)
            sub = phs_verify(phs)
            if not sub.ok:
                failures.append(("pbHL3", (l, k), tuple(sub.failures)))
    return VerifyResult(not failures, tuple(failures))


def restrict_pairing_block(t_full: ExactMatrix, basis: ExactMatrix) -> ExactMatrix:
    return basis.transpose() * t_full * basis.conj()


def _restrict_subspace(sub: Subspace, inside: Subspace) -> Subspace:
    """Coordinates of sub . inside in the basis of inside."""
    inter = sub.intersect(inside)
    cols = [inside.coords_of(c) for c in inter.basis.columns()]
    return Subspace.from_columns(inside.dim, cols)


@dataclass(frozen=True)
class HodgePieces:
    """The (p,q)-decomposition of every bigraded piece."""

    pieces: dict  # (p, q, l, k) -> Subspace in block coordinates


def pbhl_hodge_decomposition(b: BigradedHL, assume_verified: bool = False) -> HodgePieces:
    """V^{p,q}_{j,k} = {a in F^p V_{j,k} : S_{j,k}(a, b) = 0 for all
    b in F^{p-j-k+1} V_{-j,-k}}; requires pbhl_verify to pass."""
    if not assume_verified:
        check = pbhl_verify(b)
        if not check.ok:
            raise VerificationFailed(f"structure fails verification: {check.failures[:3]}")
    out = {}
    for (j, k), d in b.order:
        total = Subspace.zero(d)
        found = 0
        for p in b.f_support():
            q = b.n + j + k - p
            f = b.f_in_piece(p, (j, k))
            if f.dim == 0:
                continue
            other = b.f_in_piece(p - j - k + 1, (-j, -k))
            m = b.pairing((j, k))
            if other.dim == 0:
                piece = f
            else:
                # rows: conj(other basis)^T M^T ... a in f with a^T M conj(B) = 0
                cond = (m * other.basis.conj()).transpose()
                piece = f.intersect(kernel(cond))
            if piece.dim:
                if not total.intersect(piece).is_zero():
                    raise VerificationFailed(f"(p,q) pieces of V_({j},{k}) overlap")
                total = total.add(piece)
                found += piece.dim
                out[(p, q, j, k)] = piece
        if found != d:
            raise VerificationFailed(f"(p,q) pieces do not fill V_({j},{k})")
    # X1 maps V^{p,q}_{j,k} into V^{p+1,q+1}_{j+2,k}
    for (p, q, j, k), piece in out.items():
        dst = (j + 2, k)
        blk = b.block(b.X1, (j, k), dst)
        img = piece.image_under(blk)
        if img.dim:
            target = out.get((p + 1, q + 1) + dst)
            if target is None or not target.contains(img):
                raise VerificationFailed(
                    f"X1 does not respect Hodge pieces at ({p},{q},{j},{k})"
                )
    return HodgePieces(out)
