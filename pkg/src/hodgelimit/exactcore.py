"""Exact linear algebra over the Gaussian rationals Q(i).

Every equality asserted elsewhere in this package is meant exactly, so the
base layer works over a field with decidable equality: complex numbers whose
real and imaginary parts are ``fractions.Fraction`` values.  Matrices are
dense grids of such scalars and subspaces are stored in a canonical reduced
column echelon form, which makes subspace equality a plain comparison of the
stored bases.

All values are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

import re as _re
from fractions import Fraction
from typing import Iterable, Sequence


class AmbientMismatch(ValueError):
    """Two subspaces living in different ambient dimensions were combined."""


class NotHermitian(ValueError):
    """A matrix expected to equal its conjugate transpose does not."""


# ---------------------------------------------------------------------------
# scalars


def _fr(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot build a rational from {x!r}")


_FRAC = r"-?\d+/\d+"
_SCALAR_RE = _re.compile(rf"^({_FRAC})(?:\+({_FRAC}) i)?$")


class ExactScalar:
    """A Gaussian rational ``re + im*i`` with exact Fraction components.

    Fractions keep denominators positive and in lowest terms, so equality and
    hashing are structural.  The serialization grammar is ``p/q`` for real
    values and ``p/q+r/s i`` otherwise, with no optional whitespace (the
    single space before the literal ``i`` is part of the grammar).
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, ExactScalar):
            self_re, self_im = re.re, re.im
        else:
            self_re, self_im = _fr(re), _fr(im)
        object.__setattr__(self, "re", self_re)
        object.__setattr__(self, "im", self_im)

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    # -- field operations

    def __add__(self, other):
        other = _coerce(other)
        return ExactScalar(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return ExactScalar(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if self.im == 0 and other.im == 0:  # fast real path
            return ExactScalar(self.re * other.re)
        return ExactScalar(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if self.im == 0 and other.im == 0:
            if other.re == 0:
                raise ZeroDivisionError("division by zero ExactScalar")
            return ExactScalar(self.re / other.re)
        n = other.norm2()
        if n == 0:
            raise ZeroDivisionError("division by zero ExactScalar")
        return ExactScalar(
            (self.re * other.re + self.im * other.im) / n,
            (self.im * other.re - self.re * other.im) / n,
        )

    def __rtruediv__(self, other):
        return _coerce(other) / self

    def __neg__(self):
        return ExactScalar(-self.re, -self.im)

    def conj(self) -> "ExactScalar":
        return ExactScalar(self.re, -self.im)

    def norm2(self) -> Fraction:
        """|z|^2, a nonnegative rational, zero iff z is zero."""
        return self.re * self.re + self.im * self.im

    def inv(self) -> "ExactScalar":
        return ONE / self

    # -- predicates

    def is_zero(self) -> bool:
        return not (self.re or self.im)

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if not isinstance(other, ExactScalar):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    # -- serialization

    def __str__(self):
        if self.im == 0:
            return _frac_str(self.re)
        return f"{_frac_str(self.re)}+{_frac_str(self.im)} i"

    def __repr__(self):
        return f"ExactScalar({self})"

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * complex(self.im)

    @staticmethod
    def parse(text: str) -> "ExactScalar":
        m = _SCALAR_RE.match(text)
        if m is None:
            raise ValueError(f"bad scalar literal {text!r}")
        re_part = Fraction(m.group(1))
        im_part = Fraction(m.group(2)) if m.group(2) is not None else Fraction(0)
        return ExactScalar(re_part, im_part)


def _frac_str(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


def _coerce(x) -> ExactScalar:
    if isinstance(x, ExactScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return ExactScalar(x)
    raise TypeError(f"cannot coerce {x!r} to ExactScalar")


ZERO = ExactScalar(0)
ONE = ExactScalar(1)
I = ExactScalar(0, 1)


def scalar(re=0, im=0) -> ExactScalar:
    """Convenience constructor accepting ints, Fractions or 'p/q' strings."""
    if isinstance(re, str):
        base = ExactScalar(Fraction(re))
    else:
        base = ExactScalar(re)
    if isinstance(im, str):
        im = Fraction(im)
    return base + I * ExactScalar(im)


# ---------------------------------------------------------------------------
# matrices


class ExactMatrix:
    """A dense immutable matrix of ExactScalar entries."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, entries: Sequence[Sequence], _cols: int | None = None):
        data = tuple(tuple(_coerce(x) for x in row) for row in entries)
        rows = len(data)
        cols = len(data[0]) if rows else (_cols or 0)
        if any(len(r) != cols for r in data):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("ExactMatrix is immutable")

    # -- constructors

    @staticmethod
    def zeros(rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix([[ZERO] * cols for _ in range(rows)], _cols=cols)

    @staticmethod
    def identity(n: int) -> "ExactMatrix":
        return ExactMatrix([[ONE if i == j else ZERO for j in range(n)] for i in range(n)])

    @staticmethod
    def from_cols(ambient: int, cols: Iterable[Sequence]) -> "ExactMatrix":
        cols = [list(c) for c in cols]
        for c in cols:
            if len(c) != ambient:
                raise ValueError("column length mismatch")
        return ExactMatrix(
            [[cols[j][i] for j in range(len(cols))] for i in range(ambient)],
            _cols=len(cols),
        )

    @staticmethod
    def diagonal(values: Sequence) -> "ExactMatrix":
        vals = [_coerce(v) for v in values]
        n = len(vals)
        return ExactMatrix([[vals[i] if i == j else ZERO for j in range(n)] for i in range(n)])

    # -- access

    def __getitem__(self, ij):
        i, j = ij
        return self.data[i][j]

    def row(self, i) -> tuple:
        return self.data[i]

    def col(self, j) -> list:
        return [self.data[i][j] for i in range(self.rows)]

    def columns(self) -> list:
        return [self.col(j) for j in range(self.cols)]

    # -- algebra

    def __add__(self, other):
        self._shape_check(other)
        return ExactMatrix(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        )

    def __sub__(self, other):
        self._shape_check(other)
        return ExactMatrix(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.data, other.data)]
        )

    def __neg__(self):
        return ExactMatrix([[-a for a in r] for r in self.data])

    def scale(self, c) -> "ExactMatrix":
        c = _coerce(c)
        return ExactMatrix([[c * a for a in r] for r in self.data])

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} * {other.shape}")
        ocols = other.cols
        odata = other.data
        out = [[ZERO] * ocols for _ in range(self.rows)]
        for i, row in enumerate(self.data):
            acc = out[i]
            for k, a in enumerate(row):
                if not a:
                    continue
                brow = odata[k]
                for j, b in enumerate(brow):
                    if b:
                        acc[j] = acc[j] + a * b
        return ExactMatrix(out, _cols=ocols)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, ExactScalar)):
            return self.scale(other)
        return NotImplemented

    def apply(self, vec: Sequence) -> list:
        """Matrix times column vector (a plain list of scalars)."""
        vec = [_coerce(v) for v in vec]
        if len(vec) != self.cols:
            raise ValueError("vector length mismatch")
        return [sum((a * v for a, v in zip(r, vec) if a and v), ZERO) for r in self.data]

    def power(self, k: int) -> "ExactMatrix":
        if self.rows != self.cols or k < 0:
            raise ValueError("power needs a square matrix and k >= 0")
        out = ExactMatrix.identity(self.rows)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def transpose(self) -> "ExactMatrix":
        if self.rows == 0 or self.cols == 0:
            return ExactMatrix.zeros(self.cols, self.rows)
        return ExactMatrix(list(zip(*self.data)))

    def conj(self) -> "ExactMatrix":
        return ExactMatrix([[a.conj() for a in r] for r in self.data])

    def conj_t(self) -> "ExactMatrix":
        return self.transpose().conj()

    def hstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hstack")
        return ExactMatrix([r1 + r2 for r1, r2 in zip(self.data, other.data)])

    def vstack(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.cols:
            raise ValueError("col count mismatch in vstack")
        return ExactMatrix(self.data + other.data)

    @staticmethod
    def block_diag(blocks: Sequence["ExactMatrix"]) -> "ExactMatrix":
        rows = sum(b.rows for b in blocks)
        cols = sum(b.cols for b in blocks)
        out = [[ZERO] * cols for _ in range(rows)]
        r0 = c0 = 0
        for b in blocks:
            for i in range(b.rows):
                for j in range(b.cols):
                    out[r0 + i][c0 + j] = b.data[i][j]
            r0 += b.rows
            c0 += b.cols
        return ExactMatrix(out) if rows or cols else ExactMatrix.zeros(0, 0)

    def kron(self, other: "ExactMatrix") -> "ExactMatrix":
        out = []
        for i in range(self.rows):
            for k in range(other.rows):
                out.append(
                    [self.data[i][j] * other.data[k][l] for j in range(self.cols) for l in range(other.cols)]
                )
        return ExactMatrix(out) if out else ExactMatrix.zeros(0, self.cols * other.cols)

    # -- predicates and invariants

    @property
    def shape(self):
        return (self.rows, self.cols)

    def is_zero(self) -> bool:
        return all(a.is_zero() for r in self.data for a in r)

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.data == other.data

    def __hash__(self):
        return hash((self.shape, self.data))

    def __repr__(self):
        body = "; ".join(" ".join(str(a) for a in r) for r in self.data)
        return f"ExactMatrix({self.rows}x{self.cols}: {body})"

    def rank(self) -> int:
        return len(_rref(self.data)[1])

    def det(self) -> ExactScalar:
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        a = [list(r) for r in self.data]
        n = self.rows
        det = ONE
        for j in range(n):
            piv = next((i for i in range(j, n) if a[i][j]), None)
            if piv is None:
                return ZERO
            if piv != j:
                a[j], a[piv] = a[piv], a[j]
                det = -det
            det = det * a[j][j]
            inv = a[j][j].inv()
            for i in range(j + 1, n):
                if a[i][j]:
                    f = a[i][j] * inv
                    a[i] = [x - f * y for x, y in zip(a[i], a[j])]
        return det

    def _shape_check(self, other):
        if not isinstance(other, ExactMatrix) or self.shape != other.shape:
            raise ValueError("shape mismatch")


def commutator(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    return a * b - b * a


def exp_nilpotent(m: ExactMatrix) -> ExactMatrix:
    """exp of a nilpotent matrix as the finite sum of its power series."""
    if not m.is_square():
        raise ValueError("exp of a non-square matrix")
    n = m.rows
    out = ExactMatrix.identity(n)
    term = ExactMatrix.identity(n)
    k = 1
    while True:
        term = term * m
        if term.is_zero():
            return out
        if k > n:
            raise ValueError("matrix is not nilpotent")
        out = out + term.scale(Fraction(1, _factorial(k)))
        k += 1


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out


# ---------------------------------------------------------------------------
# echelon forms, kernels, solving


def _rref(data):
    """Reduced row echelon form of a tuple grid; returns (rows, pivot cols)."""
    a = [list(r) for r in data]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, nrows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = a[r][c].inv()
        a[r] = [x * inv if x else x for x in a[r]]
        prow = a[r]
        for i in range(nrows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y if y else x for x, y in zip(a[i], prow)]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return a, pivots


def rref(m: ExactMatrix) -> ExactMatrix:
    """Reduced row echelon form; the row space is preserved and rref is
    idempotent."""
    return ExactMatrix(_rref(m.data)[0]) if m.rows else m


def kernel(m: ExactMatrix) -> "Subspace":
    """Right kernel {v : m v = 0} as a canonical Subspace of dim cols-rank."""
    a, pivots = _rref(m.data) if m.rows else ([], [])
    ncols = m.cols
    pivset = set(pivots)
    free = [c for c in range(ncols) if c not in pivset]
    basis = []
    for f in free:
        v = [ZERO] * ncols
        v[f] = ONE
        for r, c in enumerate(pivots):
            v[c] = -a[r][f]
        basis.append(v)
    return Subspace.from_columns(ncols, basis)


def solve(m: ExactMatrix, rhs: Sequence) -> list | None:
    """One exact solution of m x = rhs, or None if the system is
    inconsistent."""
    rhs = [_coerce(v) for v in rhs]
    if len(rhs) != m.rows:
        raise ValueError("rhs length mismatch")
    aug = [list(r) + [rhs[i]] for i, r in enumerate(m.data)]
    a, pivots = _rref(aug)
    if m.cols in pivots:
        return None
    x = [ZERO] * m.cols
    for r, c in enumerate(pivots):
        x[c] = a[r][m.cols]
    return x


def solve_many(m: ExactMatrix, rhs: ExactMatrix) -> ExactMatrix | None:
    """Solve m X = rhs column by column with a single elimination; None if
    any column is inconsistent."""
    if rhs.rows != m.rows:
        raise ValueError("rhs row count mismatch")
    aug = [list(r) + list(rhs.data[i]) for i, r in enumerate(m.data)]
    a, pivots = _rref(aug)
    piv_in_rhs = [c for c in pivots if c >= m.cols]
    if piv_in_rhs:
        return None
    out = [[ZERO] * rhs.cols for _ in range(m.cols)]
    for r, c in enumerate(pivots):
        for j in range(rhs.cols):
            out[c][j] = a[r][m.cols + j]
    return ExactMatrix(out, _cols=rhs.cols) if m.cols else ExactMatrix.zeros(0, rhs.cols)


def invert(m: ExactMatrix) -> ExactMatrix:
    """Exact inverse via one elimination; raises on singular input."""
    if not m.is_square():
        raise ValueError("inverse of a non-square matrix")
    out = solve_many(m, ExactMatrix.identity(m.rows))
    if out is None or (m * out != ExactMatrix.identity(m.rows)):
        raise ValueError("matrix is singular")
    return out


# ---------------------------------------------------------------------------
# subspaces


class Subspace:
    """A linear subspace of Q(i)^n stored in reduced column echelon form.

    The stored basis matrix has independent columns and its transpose is in
    reduced row echelon form, so two Subspaces are equal iff their bases are
    identical entrywise.
    """

    __slots__ = ("ambient", "basis")

    def __init__(self, ambient: int, basis: ExactMatrix):
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", basis)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @staticmethod
    def from_columns(ambient: int, cols) -> "Subspace":
        if isinstance(cols, ExactMatrix):
            cols = cols.columns()
        cols = [list(c) for c in cols]
        if not cols:
            return Subspace(ambient, ExactMatrix.zeros(ambient, 0))
        rows, _ = _rref([[_coerce(x) for x in c] for c in cols])
        keep = [r for r in rows if any(r)]
        return Subspace(ambient, ExactMatrix.from_cols(ambient, keep))

    @staticmethod
    def zero(ambient: int) -> "Subspace":
        return Subspace(ambient, ExactMatrix.zeros(ambient, 0))

    @staticmethod
    def full(ambient: int) -> "Subspace":
        return Subspace(ambient, ExactMatrix.identity(ambient))

    @property
    def dim(self) -> int:
        return self.basis.cols

    def is_zero(self) -> bool:
        return self.dim == 0

    def is_full(self) -> bool:
        return self.dim == self.ambient

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.ambient == other.ambient and self.basis == other.basis

    def __hash__(self):
        return hash((self.ambient, self.basis))

    def __repr__(self):
        return f"Subspace(dim {self.dim} of {self.ambient})"

    # -- membership

    def contains_vector(self, vec: Sequence) -> bool:
        if self.dim == 0:
            return all(not _coerce(v) for v in vec)
        return solve(self.basis, vec) is not None

    def coords_of(self, vec: Sequence) -> list | None:
        """Coordinates of vec in the stored basis, or None if outside."""
        if self.dim == 0:
            return [] if all(not _coerce(v) for v in vec) else None
        return solve(self.basis, vec)

    def contains(self, other: "Subspace") -> bool:
        self._ambient_check(other)
        if other.dim == 0:
            return True
        if other.dim > self.dim:
            return False
        return self.basis.hstack(other.basis).rank() == self.dim

    # -- lattice operations

    def add(self, other: "Subspace") -> "Subspace":
        self._ambient_check(other)
        return Subspace.from_columns(
            self.ambient, self.basis.columns() + other.basis.columns()
        )

    def intersect(self, other: "Subspace") -> "Subspace":
        self._ambient_check(other)
        if self.dim == 0 or other.dim == 0:
            return Subspace.zero(self.ambient)
        stacked = self.basis.hstack(other.basis.scale(-1))
        ker = kernel(stacked)
        cols = []
        for v in ker.basis.columns():
            x = v[: self.dim]
            cols.append(self.basis.apply(x))
        return Subspace.from_columns(self.ambient, cols)

    def quotient_basis(self, other: "Subspace") -> list:
        """Columns of self lifting a basis of self/(self . other).

        One elimination: the pivot columns of [inter | self] landing in the
        self-part are independent modulo the intersection and span the
        complement (the intersection columns all pivot first)."""
        self._ambient_check(other)
        inter = self.intersect(other)
        combined = inter.basis.hstack(self.basis)
        if combined.cols == 0:
            return []
        _, pivots = _rref(combined.data)
        return [self.basis.col(c - inter.dim) for c in pivots if c >= inter.dim]

    # -- transport

    def image_under(self, m: ExactMatrix) -> "Subspace":
        if m.cols != self.ambient:
            raise AmbientMismatch("matrix does not act on this ambient space")
        return Subspace.from_columns(m.rows, [m.apply(c) for c in self.basis.columns()])

    def preimage_under(self, m: ExactMatrix) -> "Subspace":
        """{x : m x in self}."""
        if m.rows != self.ambient:
            raise AmbientMismatch("matrix does not land in this ambient space")
        ann = self.annihilator_rows()
        if ann.rows == 0:
            return Subspace.full(m.cols)
        return kernel(ann * m)

    def annihilator_rows(self) -> ExactMatrix:
        """Rows spanning the functionals vanishing on this subspace."""
        ker = kernel(self.basis.transpose())
        return ker.basis.transpose()

    def _ambient_check(self, other):
        if self.ambient != other.ambient:
            raise AmbientMismatch(
                f"ambient dims differ: {self.ambient} vs {other.ambient}"
            )


class SubspaceOps:
    """Result bundle of the four standard subspace operations."""

    __slots__ = ("sum", "intersection", "quotient_basis", "containment")

    def __init__(self, sum_, intersection, quotient_basis, containment):
        object.__setattr__(self, "sum", sum_)
        object.__setattr__(self, "intersection", intersection)
        object.__setattr__(self, "quotient_basis", quotient_basis)
        object.__setattr__(self, "containment", containment)

    def __setattr__(self, name, value):
        raise AttributeError("SubspaceOps is immutable")


def subspace_ops(a: Subspace, b: Subspace) -> SubspaceOps:
    """Sum, intersection, a lifted basis of a/(a^b), and containment of b in a.

    dim(sum) + dim(intersection) == dim(a) + dim(b) holds exactly.
    """
    return SubspaceOps(a.add(b), a.intersect(b), a.quotient_basis(b), a.contains(b))


# ---------------------------------------------------------------------------
# flags


class Flag:
    """An increasing filtration of Q(i)^n keyed by integers.

    Pieces are weakly increasing in the key, equal to ``bottom`` (the zero
    subspace unless stated otherwise) below the recorded support and constant
    above it.  Decreasing filtrations use the standard sign convention: the
    piece at upper index p is stored at lower index -p (``dec_piece``).
    """

    __slots__ = ("ambient", "steps", "bottom")

    def __init__(self, ambient: int, pieces: dict, bottom: "Subspace | None" = None):
        if bottom is None:
            bottom = Subspace.zero(ambient)
        if bottom.ambient != ambient:
            raise AmbientMismatch("flag bottom in wrong ambient space")
        items = sorted(pieces.items())
        prev = bottom
        steps = []
        for k, sub in items:
            if not isinstance(sub, Subspace):
                sub = Subspace.from_columns(ambient, sub)
            if sub.ambient != ambient:
                raise AmbientMismatch("flag piece in wrong ambient space")
            if not sub.contains(prev):
                raise ValueError(f"flag is not increasing at index {k}")
            if sub != prev:
                steps.append((k, sub))
            prev = sub
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "steps", tuple(steps))
        object.__setattr__(self, "bottom", bottom)

    def __setattr__(self, name, value):
        raise AttributeError("Flag is immutable")

    @staticmethod
    def from_decreasing(ambient: int, pieces: dict) -> "Flag":
        return Flag(ambient, {-p: sub for p, sub in pieces.items()})

    @staticmethod
    def trivial(ambient: int, at: int = 0) -> "Flag":
        """The flag jumping from zero straight to the full space at ``at``."""
        return Flag(ambient, {at: Subspace.full(ambient)})

    @staticmethod
    def constant(sub: "Subspace") -> "Flag":
        """The flag equal to ``sub`` at every level (saturated when full)."""
        return Flag(sub.ambient, {}, bottom=sub)

    def piece(self, k: int) -> Subspace:
        out = self.bottom
        for key, sub in self.steps:
            if key <= k:
                out = sub
            else:
                break
        return out

    def dec_piece(self, p: int) -> Subspace:
        return self.piece(-p)

    def keys(self) -> list:
        return [k for k, _ in self.steps]

    def top(self) -> Subspace:
        return self.steps[-1][1] if self.steps else self.bottom

    def is_exhaustive(self) -> bool:
        return self.top().is_full()

    def support(self) -> tuple:
        """(lo, hi) with piece constant below lo and above hi."""
        if not self.steps:
            return (0, 0)
        return (self.steps[0][0], self.steps[-1][0])

    def shift(self, r: int) -> "Flag":
        """Reindex k -> k + r (for decreasing pieces, F^p -> F^{p-r})."""
        return Flag(self.ambient, {k + r: sub for k, sub in self.steps}, bottom=self.bottom)

    def __eq__(self, other):
        if not isinstance(other, Flag):
            return NotImplemented
        return (
            self.ambient == other.ambient
            and self.steps == other.steps
            and self.bottom == other.bottom
        )

    def __hash__(self):
        return hash((self.ambient, self.steps, self.bottom))

    def __repr__(self):
        body = ", ".join(f"{k}:{s.dim}" for k, s in self.steps)
        return f"Flag({self.ambient}; {body})"


# ---------------------------------------------------------------------------
# hermitian positivity


def hermitian_positive_definite(m: ExactMatrix) -> bool:
    """Exact Sylvester criterion: all leading principal minors positive.

    Raises NotHermitian unless m equals its conjugate transpose.  The minors
    of a Hermitian matrix are real, so positivity is a rational comparison.
    """
    if not m.is_square():
        raise NotHermitian("matrix is not square")
    if m != m.conj_t():
        raise NotHermitian("matrix is not equal to its conjugate transpose")
    a = [list(r) for r in m.data]
    n = m.rows
    minor = ONE
    for j in range(n):
        piv = a[j][j]
        minor = minor * piv
        if not minor.is_real() or minor.re <= 0:
            return False
        inv = piv.inv()
        for i in range(j + 1, n):
            if a[i][j]:
                f = a[i][j] * inv
                for k in range(j, n):
                    a[i][k] = a[i][k] - f * a[j][k]
    return True


def hermitian_positive_semidefinite(m: ExactMatrix) -> bool:
    """All principal minors nonnegative (exact; O(2^n), small dims only)."""
    if not m.is_square():
        raise NotHermitian("matrix is not square")
    if m != m.conj_t():
        raise NotHermitian("matrix is not equal to its conjugate transpose")
    n = m.rows
    from itertools import combinations

    for size in range(1, n + 1):
        for idx in combinations(range(n), size):
            sub = ExactMatrix([[m.data[i][j] for j in idx] for i in idx])
            d = sub.det()
            if not d.is_real() or d.re < 0:
                return False
    return True


# ---------------------------------------------------------------------------
# JSON serialization


def matrix_to_json(m: ExactMatrix) -> dict:
    """{"rows": r, "cols": c, "entries": [["p/q", "p/q+r/s i", ...], ...]}"""
    return {
        "rows": m.rows,
        "cols": m.cols,
        "entries": [[str(a) for a in row] for row in m.data],
    }


def matrix_from_json(obj: dict) -> ExactMatrix:
    rows, cols = obj["rows"], obj["cols"]
    entries = obj["entries"]
    if len(entries) != rows or any(len(r) != cols for r in entries):
        raise ValueError("matrix JSON shape mismatch")
    if rows == 0 or cols == 0:
        return ExactMatrix.zeros(rows, cols)
    return ExactMatrix([[ExactScalar.parse(x) for x in row] for row in entries])
