"""Bundled desk-scale degeneration models.

Every builder returns a DegenerationSpec with full stratum cohomology,
restriction/Gysin maps, Lefschetz operators and pairings, so that the whole
pipeline (pages, limit numbers, invariant-cycle and hard Lefschetz checks)
runs on it.  Pairing conventions: for a stratum of dimension d with
hyperplane class h the matrix of B_m on H^m x conj(H^{2d-m}) is
B_{2a}(h^a, h^{d-a}) = eps(d+1)(-1)^{d-a}; odd cohomology of curves uses the
diagonal form +1 on (1,0) classes and -1 on (0,1) classes in a
Hodge-adapted basis.
"""

from __future__ import annotations

from fractions import Fraction

from .exactcore import ExactMatrix
from .sncdegeneration import AlphaData, DegenerationSpec, StratumData, _eps


def _pn_stratum(d: int) -> StratumData:
    """H^*(P^d) with its standard classes 1, h, ..., h^d."""
    betti = {2 * a: 1 for a in range(d + 1)}
    hodge = {2 * a: {(a, a): 1} for a in range(d + 1)}
    pairing = {
        2 * a: ExactMatrix([[_eps(d + 1) * ((-1) ** ((d - a) % 2))]])
        for a in range(d + 1)
    }
    return StratumData(dim=d, betti=betti, hodge=hodge, pairing=pairing)


def _point_stratum() -> StratumData:
    return _pn_stratum(0)


def _curve_stratum(genus: int) -> StratumData:
    """A smooth projective curve of the given genus, Hodge-adapted H^1."""
    betti = {0: 1, 2: 1}
    hodge = {0: {(0, 0): 1}, 2: {(1, 1): 1}}
    pairing = {0: ExactMatrix([[1]]), 2: ExactMatrix([[-1]])}
    if genus:
        betti[1] = 2 * genus
        hodge[1] = {(1, 0): genus, (0, 1): genus}
        diag = [1] * genus + [-1] * genus
        pairing[1] = ExactMatrix(
            [[diag[i] if i == j else 0 for j in range(2 * genus)] for i in range(2 * genus)]
        )
    return StratumData(dim=1, betti=betti, hodge=hodge, pairing=pairing)


def _curve_lefschetz() -> dict:
    return {0: ExactMatrix([[1]])}


def kodaira_in(n_components: int, scale: int = 1) -> DegenerationSpec:
    """A cycle of n rational curves (the I_N fiber), optionally with every
    multiplicity scaled by the same factor."""
    if n_components < 3:
        raise ValueError("the cycle model needs at least 3 components")
    verts = [(i,) for i in range(n_components)]
    edges = sorted({tuple(sorted((i, (i + 1) % n_components))) for i in range(n_components)})
    strata = {}
    lefschetz = {}
    for v in verts:
        strata[v] = _pn_stratum(1)
        lefschetz[v] = _curve_lefschetz()
    for e in edges:
        strata[e] = _point_stratum()
    restrictions = {}
    gysin = {}
    for e in edges:
        for v in e:
            key = ((v,), [x for x in e if x != v][0])
            restrictions[key] = {0: ExactMatrix([[1]])}
            gysin[key] = {0: ExactMatrix([[1]])}
    return DegenerationSpec(
        multiplicities=[scale] * n_components,
        rel_dim=1,
        strata=strata,
        restrictions=restrictions,
        gysin=gysin,
        lefschetz=lefschetz,
    )


def rational_chain(n_components: int) -> DegenerationSpec:
    """A chain of rational curves (degeneration of a single P^1)."""
    strata = {}
    lefschetz = {}
    restrictions = {}
    gysin = {}
    for i in range(n_components):
        strata[(i,)] = _pn_stratum(1)
        lefschetz[(i,)] = _curve_lefschetz()
    for i in range(n_components - 1):
        e = (i, i + 1)
        strata[e] = _point_stratum()
        for v in e:
            key = ((v,), [x for x in e if x != v][0])
            restrictions[key] = {0: ExactMatrix([[1]])}
            gysin[key] = {0: ExactMatrix([[1]])}
    return DegenerationSpec(
        multiplicities=[1] * n_components,
        rel_dim=1,
        strata=strata,
        restrictions=restrictions,
        gysin=gysin,
        lefschetz=lefschetz,
    )


def smooth_fiber(genus: int) -> DegenerationSpec:
    """A single smooth reduced component: the operator is zero and the page
    is concentrated in the k = 0 column."""
    return DegenerationSpec(
        multiplicities=[1],
        rel_dim=1,
        strata={(0,): _curve_stratum(genus)},
        lefschetz={(0,): _curve_lefschetz()},
    )


def disjoint_pair(genus_a: int, genus_b: int) -> DegenerationSpec:
    """Two disjoint smooth components (no intersections at all)."""
    return DegenerationSpec(
        multiplicities=[1, 1],
        rel_dim=1,
        strata={(0,): _curve_stratum(genus_a), (1,): _curve_stratum(genus_b)},
        lefschetz={(0,): _curve_lefschetz(), (1,): _curve_lefschetz()},
    )


def double_genus2() -> DegenerationSpec:
    """One genus-2 component of multiplicity 2.

    The half-eigenvalue carries the cohomology of the square-root local
    system: no H^0 or H^2, and a two-dimensional H^1.
    """
    eigen_stratum = StratumData(
        dim=1,
        betti={1: 2},
        hodge={1: {(1, 0): 1, (0, 1): 1}},
        pairing={1: ExactMatrix([[1, 0], [0, -1]])},
        compact_smooth=False,
    )
    eigen = {
        Fraction(1, 2): AlphaData(
            strata={(0,): eigen_stratum},
            lefschetz={(0,): {}},
        )
    }
    return DegenerationSpec(
        multiplicities=[2],
        rel_dim=1,
        strata={(0,): _curve_stratum(2)},
        lefschetz={(0,): _curve_lefschetz()},
        eigen=eigen,
    )


def two_curves_23() -> DegenerationSpec:
    """An elliptic curve with multiplicity 2 meeting a rational curve with
    multiplicity 3 in a single point; the nonzero eigenvalues carry no
    cohomology (their local systems are nontrivial on every stratum)."""
    strata = {
        (0,): _curve_stratum(1),
        (1,): _pn_stratum(1),
        (0, 1): _point_stratum(),
    }
    restrictions = {}
    gysin = {}
    for v, other in (((0,), 1), ((1,), 0)):
        restrictions[(v, other)] = {0: ExactMatrix([[1]])}
        gysin[(v, other)] = {0: ExactMatrix([[1]])}
    eigen = {
        Fraction(1, 2): AlphaData(strata={}),
        Fraction(1, 3): AlphaData(strata={}),
        Fraction(2, 3): AlphaData(strata={}),
    }
    return DegenerationSpec(
        multiplicities=[2, 3],
        rel_dim=1,
        strata=strata,
        restrictions=restrictions,
        gysin=gysin,
        lefschetz={(0,): _curve_lefschetz(), (1,): _curve_lefschetz(), (0, 1): {}},
        eigen=eigen,
    )
