"""Graded local models of the nearby-cycle module.

The chart t = z_0^{e_0} ... z_k^{e_k} in coordinates z_0..z_n gives, at the
commutative graded level, the quotient of Q[z_0..z_n, zeta_0..zeta_n] by the
homogeneous ideal generated by

    t_alpha = prod of z_i over the local index set of the eigenvalue,
    D_i = (1/e_i) z_i zeta_i - (1/e_0) z_0 zeta_0   (1 <= i <= k),
    zeta_i                                           (k < i <= n),

with the induced operator [R] = multiplication by (1/e_0) z_0 zeta_0.  All
relations are bihomogeneous in (z-degree, zeta-degree), so every bidegree is
an independent finite-dimensional linear-algebra problem.  Because each
relation multiple has at most two nonzero monomial coefficients, the
quotient of a bidegree is computed by a weighted union-find on monomials:
components not meeting the dead set (multiples of t_alpha or of a truncated
zeta-variable) form a basis, with scalars tracked along the identifications
z_i zeta_i ~ (e_i/e_0) z_0 zeta_0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .exactcore import ExactMatrix, ExactScalar


class TruncationTooSmall(ValueError):
    pass


@dataclass(frozen=True)
class LocalModel:
    """Chart data: coordinates z_0..z_n, divisor coordinates z_0..z_k with
    multiplicities e_0..e_k, an eigenvalue in [0,1), and the truncation."""

    n: int
    multiplicities: tuple
    alpha: Fraction
    truncation_degree: int

    def __post_init__(self):
        if len(self.multiplicities) > self.n + 1:
            raise ValueError("more divisor coordinates than coordinates")
        if any(e < 1 for e in self.multiplicities):
            raise ValueError("multiplicities must be >= 1")
        if not (0 <= self.alpha < 1):
            raise ValueError("the eigenvalue must lie in [0,1)")

    @property
    def k(self) -> int:
        return len(self.multiplicities) - 1

    @property
    def local_index_set(self) -> tuple:
        return tuple(
            i for i, e in enumerate(self.multiplicities) if (self.alpha * e).denominator == 1
        )

    @property
    def mu(self) -> int:
        return len(self.local_index_set) - 1

    def eigenvalues(self) -> list:
        return sorted({Fraction(j, e) for e in self.multiplicities for j in range(e)})


def local_model(n, multiplicities, alpha=0, truncation_degree=8) -> LocalModel:
    return LocalModel(n, tuple(multiplicities), Fraction(alpha), truncation_degree)


# ---------------------------------------------------------------------------
# monomials and components

# a monomial is (z_exps, zeta_exps): tuples of length n+1 and k+1 (the
# truncated zeta variables never enter a live monomial)


def _monomials_of_degree(nvars: int, deg: int):
    if nvars == 0:
        if deg == 0:
            yield ()
        return
    if nvars == 1:
        yield (deg,)
        return
    for first in range(deg + 1):
        for rest in _monomials_of_degree(nvars - 1, deg - first):
            yield (first,) + rest


class _Components:
    """Weighted union-find over the monomials of one bidegree."""

    def __init__(self):
        self.parent = {}
        self.weight = {}  # x = weight[x] * root(x)
        self.dead_roots = set()

    def add(self, x):
        if x not in self.parent:
            self.parent[x] = x
            self.weight[x] = Fraction(1)

    def find(self, x):
        path = []
        while self.parent[x] != x:
            path.append(x)
            x = self.parent[x]
        w = Fraction(1)
        for y in reversed(path):
            w *= self.weight[y]
            self.parent[y] = x
            self.weight[y] = w
        return x

    def weight_to_root(self, x):
        root = self.find(x)
        return self.weight[x], root

    def union(self, a, c, b):
        """Impose a = c * b in the quotient."""
        self.add(a)
        self.add(b)
        wa, ra = self.weight_to_root(a)
        wb, rb = self.weight_to_root(b)
        if ra == rb:
            if wa != c * wb:
                # a = wa ra and a = c wb ra force ra = 0
                self.dead_roots.add(ra)
            return
        # ra = (c * wb / wa) rb
        self.parent[ra] = rb
        self.weight[ra] = c * wb / wa
        if ra in self.dead_roots:
            self.dead_roots.discard(ra)
            self.dead_roots.add(rb)

    def kill(self, x):
        self.add(x)
        self.dead_roots.add(self.find(x))

    def live_roots(self):
        roots = set()
        for x in self.parent:
            r = self.find(x)
            if r not in self.dead_roots:
                roots.add(r)
        return sorted(roots)

    def is_dead(self, x):
        if x not in self.parent:
            return False
        return self.find(x) in self.dead_roots


@dataclass
class BidegreePiece:
    monomials: list
    components: _Components
    basis: list  # live component roots, sorted

    @property
    def dim(self) -> int:
        return len(self.basis)


class GradedQuotient:
    """The truncated bigraded quotient with per-bidegree component bases."""

    def __init__(self, model: LocalModel):
        self.model = model
        self.pieces = {}
        e = model.multiplicities
        i_alpha = model.local_index_set
        n, k, D = model.n, model.k, model.truncation_degree
        for a in range(D + 1):
            for b in range(D + 1):
                comps = _Components()
                monos = []
                for zexp in _monomials_of_degree(n + 1, a):
                    for cexp in _monomials_of_degree(k + 1, b):
                        m = (zexp, cexp)
                        comps.add(m)
                        monos.append(m)
                        if all(zexp[i] >= 1 for i in i_alpha):
                            comps.kill(m)  # multiple of t_alpha
                for m in monos:
                    zexp, cexp = m
                    for i in range(1, k + 1):
                        if zexp[i] >= 1 and cexp[i] >= 1:
                            # z_i zeta_i m' ~ (e_i/e_0) z_0 zeta_0 m'
                            other = (
                                _bump(_bump(zexp, i, -1), 0, 1),
                                _bump(_bump(cexp, i, -1), 0, 1),
                            )
                            comps.union(m, Fraction(e[i], e[0]), other)
                self.pieces[(a, b)] = BidegreePiece(monos, comps, comps.live_roots())

    def dim(self, a: int, b: int) -> int:
        return self.pieces[(a, b)].dim

    def hilbert_function(self) -> dict:
        return {ab: p.dim for ab, p in sorted(self.pieces.items()) if p.dim}

    def component_of(self, monomial):
        """(weight, root) of a monomial, or None when it is zero."""
        zexp, cexp = monomial
        a, b = sum(zexp), sum(cexp)
        piece = self.pieces.get((a, b))
        if piece is None:
            raise TruncationTooSmall(f"bidegree ({a},{b}) beyond the truncation")
        if piece.components.is_dead(monomial):
            return None
        return piece.components.weight_to_root(monomial)

    def r_image(self, monomial, power: int = 1):
        """[R]^power of a monomial: scalar times a component root, or None."""
        zexp, cexp = monomial
        e0 = self.model.multiplicities[0]
        target = (_bump(zexp, 0, power), _bump(cexp, 0, power))
        out = self.component_of(target)
        if out is None:
            return None
        w, root = out
        return w * Fraction(1, e0**power), root


def _bump(exps, i, delta):
    out = list(exps)
    out[i] += delta
    return tuple(out)


def build_truncated_quotient(model: LocalModel) -> GradedQuotient:
    """Degree-by-degree quotient; lower bidegrees are unchanged when the
    truncation degree is raised (each bidegree is self-contained)."""
    return GradedQuotient(model)


# ---------------------------------------------------------------------------
# kernel generators


def generator_divisors(model: LocalModel, r: int) -> list:
    """All squarefree degree-(mu - r) monomials dividing t_alpha, as z-index
    subsets of the local index set."""
    i_alpha = model.local_index_set
    mu = model.mu
    if r > mu:
        raise ValueError(f"r = {r} exceeds mu = {mu}")
    return [tuple(sorted(c)) for c in combinations(i_alpha, mu - r)]


@dataclass
class KernelCheckResult:
    passed: bool
    witnesses: list  # (bidegree, monomial root, reason)
    checked_bidegrees: int


def kernel_generators_check(model: LocalModel, r: int, quotient: GradedQuotient | None = None) -> KernelCheckResult:
    """Within the truncation, ker [R]^{r+1} equals the submodule generated
    by the degree-(mu - r) monomials dividing t_alpha, bidegree by bidegree
    up to the safety margin r+1.

    [R]^{r+1} sends bidegree (a,b) to (a+r+1, b+r+1) and is a monomial map
    on component representatives, so the kernel is spanned by the
    components mapping to zero together with differences of components
    sharing a live target; the check verifies that the generated span
    accounts for exactly the first kind and that no collisions occur.
    """
    if quotient is None:
        quotient = build_truncated_quotient(model)
    D = model.truncation_degree
    margin = r + 1
    if D < margin:
        raise TruncationTooSmall(f"truncation {D} cannot certify [R]^{r + 1} kernels")
    gens = generator_divisors(model, r)
    n, k = model.n, model.k
    witnesses = []
    checked = 0
    for a in range(D - margin + 1):
        for b in range(D - margin + 1):
            checked += 1
            piece = quotient.pieces[(a, b)]
            # components hit by the generated submodule
            gen_roots = set()
            deg_gen = model.mu - r
            if a >= deg_gen:
                for K in gens:
                    base = tuple(1 if i in K else 0 for i in range(n + 1))
                    for zrest in _monomials_of_degree(n + 1, a - deg_gen):
                        zexp = tuple(x + y for x, y in zip(base, zrest))
                        for cexp in _monomials_of_degree(k + 1, b):
                            m = (zexp, cexp)
                            if not piece.components.is_dead(m):
                                gen_roots.add(piece.components.find(m))
            # classify the monomial map [R]^{r+1}
            to_zero = set()
            by_target = {}
            for root in piece.basis:
                img = quotient.r_image(root, power=margin)
                if img is None:
                    to_zero.add(root)
                else:
                    by_target.setdefault(img[1], []).append(root)
            # generated submodule must map to zero (one containment)
            for root in sorted(gen_roots - to_zero):
                witnesses.append(((a, b), root, "generator not annihilated"))
            # kernel must not exceed the generated span (other containment)
            for root in sorted(to_zero - gen_roots):
                witnesses.append(((a, b), root, "kernel element outside generators"))
            for target, srcs in sorted(by_target.items()):
                if len(srcs) > 1:
                    witnesses.append(
                        ((a, b), srcs[0], "collision: kernel contains a difference")
                    )
    return KernelCheckResult(not witnesses, witnesses, checked)


def generators_annihilated(model: LocalModel, r: int, quotient: GradedQuotient | None = None) -> bool:
    """Direct multiplication check of the easy containment: every
    degree-(mu - r) divisor of t_alpha is killed by [R]^{r+1}."""
    if quotient is None:
        quotient = build_truncated_quotient(model)
    n, k = model.n, model.k
    for K in generator_divisors(model, r):
        zexp = tuple(1 if i in K else 0 for i in range(n + 1))
        m = (zexp, (0,) * (k + 1))
        if quotient.r_image(m, power=r + 1) is not None:
            return False
    return True


def r_choice_independent(model: LocalModel, quotient: GradedQuotient | None = None) -> bool:
    """multiplication by (1/e_i) z_i zeta_i agrees with [R] for every i in
    the local index set, on every live component within the margin."""
    if quotient is None:
        quotient = build_truncated_quotient(model)
    D = model.truncation_degree
    e = model.multiplicities
    for (a, b), piece in quotient.pieces.items():
        if a > D - 1 or b > D - 1:
            continue
        for root in piece.basis:
            base = quotient.r_image(root)
            for i in model.local_index_set:
                zexp, cexp = root
                target = (_bump(zexp, i, 1), _bump(cexp, i, 1))
                out = quotient.component_of(target)
                scaled = None if out is None else (out[0] / e[i], out[1])
                if scaled != base:
                    return False
    return True


# ---------------------------------------------------------------------------
# characteristic multiplicities


def char_multiplicity_local(model: LocalModel, J) -> int:
    """Length of the one-variable Artinian model C{z}/(z^{sum of e_j over J}),
    computed by explicitly counting its monomial basis."""
    J = tuple(sorted(J))
    if any(j < 0 or j > model.k for j in J):
        raise ValueError(f"indices {J} outside the divisor range")
    power = sum(model.multiplicities[j] for j in J)
    count = 0
    degree = 0
    while degree < power:
        count += 1  # the monomial z^degree survives
        degree += 1
    return count
