"""Numerical verification of the residue-pairing analysis on model charts.

Everything is reduced to products of one-dimensional radial integrals by
using separable test functions eta(z) = prod eta_i(|z_i|^2).  For a chart
with coordinates z_0..z_n, divisor exponents e_0..e_k, eigenvalue a and
monomial sections indexed by K_1, K_2, the Mellin transform factorizes as

    F(s) = prod_i integral_0^1 rho^{(s+a) e_i + c_i - 1} eta_i(rho) drho
           x (masses of the trailing coordinates),

where c_i encodes the section exponents and the fractional weights
{-a e_i}.  Laurent coefficients in sigma = s + a are computed from
log-moment integrals (never by numerical differentiation): after the
substitution rho = exp(-x) every needed integral is a smooth, exponentially
decaying quadrature on a half line, which also tames the borderline
fractional weights of the non-integral eigenvalue charts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import quad


class QuadratureNonconvergence(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_depth: int = 200
    # how the log^t singularities are handled: "exp" substitutes rho=e^{-x},
    # "taylor" splits off the profile's Taylor tail (the slower oracle route)
    log_mode: str = "exp"

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")


DEFAULT_CONFIG = QuadratureConfig()


# ---------------------------------------------------------------------------
# radial profiles


class RadialBump:
    """eta(rho) = height * exp(-rho/(width - rho)) on [0, width), zero after.

    Smooth on [0, 1), vanishes identically near rho = 1 for width < 1, with
    closed-form first and second derivatives.
    """

    def __init__(self, height: float = 1.0, width: float = 0.75):
        if not 0 < width < 1:
            raise ValueError("width must lie in (0,1)")
        self.height = float(height)
        self.width = float(width)

    @property
    def at_zero(self) -> float:
        return self.height

    def value(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        inside = rho < self.width
        r = rho[inside]
        out[inside] = self.height * np.exp(-r / (self.width - r))
        return out if out.shape else float(out)

    def d1(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        inside = rho < self.width
        r = rho[inside]
        g = self.width / (self.width - r) ** 2
        out[inside] = -self.height * np.exp(-r / (self.width - r)) * g
        return out if out.shape else float(out)

    def d2(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        inside = rho < self.width
        r = rho[inside]
        g = self.width / (self.width - r) ** 2
        gp = 2.0 * self.width / (self.width - r) ** 3
        out[inside] = self.height * np.exp(-r / (self.width - r)) * (g * g - gp)
        return out if out.shape else float(out)


class VanishingBump:
    """rho times a bump: a smooth profile with value 0 at the origin."""

    def __init__(self, height: float = 1.0, width: float = 0.75):
        self.base = RadialBump(height, width)

    @property
    def at_zero(self) -> float:
        return 0.0

    def value(self, rho):
        return np.asarray(rho, dtype=float) * self.base.value(rho)

    def d1(self, rho):
        return self.base.value(rho) + np.asarray(rho, dtype=float) * self.base.d1(rho)

    def d2(self, rho):
        return 2.0 * self.base.d1(rho) + np.asarray(rho, dtype=float) * self.base.d2(rho)


@dataclass(frozen=True)
class SeparableTestFunction:
    """One radial profile per coordinate; eta(z) = prod eta_i(|z_i|^2)."""

    profiles: tuple

    @staticmethod
    def bumps(count: int, width: float = 0.75, heights=None) -> "SeparableTestFunction":
        heights = heights or [1.0] * count
        return SeparableTestFunction(tuple(RadialBump(h, width) for h in heights))


# ---------------------------------------------------------------------------
# one-dimensional building blocks


def _quad(f, a, b, config: QuadratureConfig):
    import warnings
    from scipy.integrate import IntegrationWarning

    with warnings.catch_warnings():
        # convergence is judged against the returned error estimate below
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(
            f, a, b, epsabs=config.abs_tol, epsrel=config.rel_tol, limit=config.max_depth
        )
    if not math.isfinite(val) or err > max(1e-6, 1e3 * config.abs_tol) * max(1.0, abs(val)):
        raise QuadratureNonconvergence(f"quadrature error {err} too large for value {val}")
    return val


def log_moment(profile, t: int, c: float, e: int = 1, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """(e^t / t!) * integral_0^1 (log rho)^t rho^{c-1} eta(rho) drho for
    c > 0, and the renormalized version against eta - eta(0) for c = 0.

    Computed after rho = exp(-x): the integrand becomes
    (-x)^t e^{-c x} eta(e^{-x}), smooth and rapidly decaying.
    """
    if config.log_mode == "taylor":
        return _log_moment_taylor(profile, t, c, e, config)
    scale = e**t / math.factorial(t)
    if c > 0:

        def f(x):
            return (-x) ** t * math.exp(-c * x) * float(profile.value(math.exp(-x)))

    else:

        def f(x):
            return (-x) ** t * (float(profile.value(math.exp(-x))) - profile.at_zero)

    return scale * _quad(f, 0.0, np.inf, config)


def _log_moment_taylor(profile, t: int, c: float, e: int, config: QuadratureConfig) -> float:
    """Secondary oracle: split the profile into its degree-2 Taylor tail at
    the origin (integrated in closed form) plus a smooth remainder."""
    delta = 0.25
    eta0 = profile.at_zero
    eta1 = float(profile.d1(0.0))
    eta2 = float(profile.d2(0.0))
    scale = e**t / math.factorial(t)
    renormalized = c == 0

    def closed(power, tt):
        # integral_0^delta rho^{power-1} log^tt rho drho, power > 0
        out = 0.0
        sign = 1.0
        # repeated integration by parts: I(m, t) = d^m/m log^t d - (t/m) I(m, t-1)
        val = delta**power / power * math.log(delta) ** tt
        rest = val
        cur_t = tt
        coef = 1.0
        total = 0.0
        while cur_t >= 0:
            total += coef * (delta**power / power) * math.log(delta) ** cur_t
            coef *= -cur_t / power
            cur_t -= 1
        return total

    taylor = [(eta0, 0), (eta1, 1), (eta2 / 2.0, 2)]
    if renormalized:
        taylor = [(eta1, 1), (eta2 / 2.0, 2)]  # eta - eta(0)

    head = 0.0
    for coeff, j in taylor:
        if coeff:
            head += coeff * closed(c + j if not renormalized else j, t)

    def remainder(rho):
        base = float(profile.value(rho)) - (eta0 + eta1 * rho + eta2 / 2.0 * rho * rho)
        weight = rho ** (c - 1) if not renormalized else 1.0 / rho
        return math.log(rho) ** t * weight * base

    def smooth_part(rho):
        val = float(profile.value(rho))
        if renormalized:
            val -= eta0
            return math.log(rho) ** t * val / rho
        return math.log(rho) ** t * rho ** (c - 1) * val

    tail = _quad(remainder, 1e-12, delta, config) + _quad(smooth_part, delta, 1.0, config)
    return scale * (head + tail)


def profile_mass(profile, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    return log_moment(profile, 0, 1.0, 1, config)


# ---------------------------------------------------------------------------
# Laurent series arithmetic


@dataclass
class LaurentSeries:
    """coeffs[j] multiplies sigma^(min_exp + j)."""

    min_exp: int
    coeffs: list

    def __mul__(self, other):
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        out[i + j] += a * b
        return LaurentSeries(self.min_exp + other.min_exp, out)

    def scale(self, c):
        return LaurentSeries(self.min_exp, [c * a for a in self.coeffs])

    def coefficient(self, exponent: int) -> float:
        j = exponent - self.min_exp
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return 0.0

    def pole_order(self, threshold: float) -> int:
        top = max((abs(a) for a in self.coeffs), default=0.0)
        if top == 0.0:
            return 0
        for j, a in enumerate(self.coeffs):
            if abs(a) > threshold * top:
                return max(0, -(self.min_exp + j))
        return 0


def coordinate_series(
    profile,
    e: int,
    c: float,
    order: int,
    config: QuadratureConfig = DEFAULT_CONFIG,
) -> LaurentSeries:
    """Laurent data of integral rho^{sigma e + c - 1} eta drho at sigma = 0.

    c = 0 gives the simple pole eta(0)/(e sigma) plus the renormalized
    log-moments; c > 0 is analytic with plain log-moment coefficients.
    """
    if c == 0:
        coeffs = [profile.at_zero / e]
        for t in range(order):
            coeffs.append(log_moment(profile, t, 0.0, e, config))
        return LaurentSeries(-1, coeffs)
    coeffs = [log_moment(profile, t, c, e, config) for t in range(order + 1)]
    return LaurentSeries(0, coeffs)


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class ModelChart:
    """A local chart t = z_0^{e_0} ... z_k^{e_k} in coordinates z_0..z_n,
    with monomial test sections z_{K_1}, z_{K_2} for subsets of the local
    index set of the eigenvalue."""

    n: int
    multiplicities: tuple
    alpha: Fraction
    K1: tuple = ()
    K2: tuple = ()
    eta: SeparableTestFunction | None = None

    def __post_init__(self):
        if len(self.multiplicities) > self.n + 1:
            raise ValueError("more divisor exponents than coordinates")
        i_alpha = set(self.local_index_set)
        for K in (self.K1, self.K2):
            if not set(K) <= i_alpha:
                raise ValueError("section indices must lie in the local index set")

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

    def profiles(self) -> tuple:
        eta = self.eta or SeparableTestFunction.bumps(self.n + 1)
        if len(eta.profiles) != self.n + 1:
            raise ValueError("need one profile per coordinate")
        return eta.profiles


def chart(n, multiplicities, alpha=0, K1=(), K2=(), eta=None) -> ModelChart:
    return ModelChart(n, tuple(multiplicities), Fraction(alpha), tuple(K1), tuple(K2), eta)


def _coordinate_exponent(ch: ModelChart, i: int, K) -> float:
    """c_i in the sigma-expansion: fractional weight plus the section shift."""
    e_i = ch.multiplicities[i]
    frac = float(math.ceil(ch.alpha * e_i) - ch.alpha * e_i)  # {-alpha e_i}
    return frac + (1.0 if i in K else 0.0)


def mellin_series(ch: ModelChart, order: int = 6, config: QuadratureConfig = DEFAULT_CONFIG) -> LaurentSeries:
    """Laurent expansion of F(s) in sigma = s + alpha for the diagonal-type
    integrand |z_K1 z_K2|-weighted; sections must agree on angular content
    (use off_diagonal_vanishing for K1 != K2)."""
    if ch.K1 != ch.K2:
        raise ValueError("mellin_series needs the diagonal case K1 == K2")
    profs = ch.profiles()
    series = LaurentSeries(0, [1.0])
    for i in range(ch.k + 1):
        c_i = _coordinate_exponent(ch, i, ch.K1)
        series = series * coordinate_series(profs[i], ch.multiplicities[i], c_i, order + ch.k + 2, config)
    mass = 1.0
    for j in range(ch.k + 1, ch.n + 1):
        mass *= profile_mass(profs[j], config)
    return series.scale(mass)


# ---------------------------------------------------------------------------
# the verification operations


def renormalization_residue(profile, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Residue at s = 0 of integral rho^{s-1} g(rho) drho: extracted from
    s F(s) via integration by parts (never from g(0) directly)."""

    def f(rho):
        return -float(profile.d1(rho))

    return _quad(f, 0.0, 1.0, config)


def renormalization_residue_sampled(profile, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Independent route: evaluate s F(s) at small s > 0 by direct singular
    quadrature and extrapolate to s = 0 (Richardson on three nodes)."""

    def sF(s):
        def f(x):
            # rho = e^{-x}: integral rho^{s-1} g = integral e^{-s x} g(e^{-x}) dx
            return math.exp(-s * x) * float(profile.value(math.exp(-x)))

        return s * _quad(f, 0.0, np.inf, config)

    h = 0.1
    f1, f2, f3 = sF(h), sF(h / 2), sF(h / 4)
    # Richardson: kill the O(s) term, then the O(s^2) term
    g1 = 2 * f2 - f1
    g2 = 2 * f3 - f2
    return (4 * g2 - g1) / 3


def poincare_lelong_1d(profile, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """(i/2pi)-normalized integral of log|z|^2 del delbar eta over the disk,
    radially reduced to integral_0^1 log rho (rho eta')' drho."""

    def f(x):
        rho = math.exp(-x)
        d1 = float(profile.d1(rho))
        d2 = float(profile.d2(rho))
        # log rho * (eta' + rho eta'') * drho, drho = -rho dx, log rho = -x
        return (-x) * (d1 + rho * d2) * (-rho)

    return -_quad(f, 0.0, np.inf, config)


def poincare_lelong_parts_oracle(profile, config: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Integration-by-parts oracle: the same current evaluates to
    -integral eta' drho."""

    def f(rho):
        return -float(profile.d1(rho))

    return _quad(f, 0.0, 1.0, config)


@dataclass
class LaurentData:
    series: LaurentSeries
    pole_order: int

    def coefficient(self, exponent: int) -> float:
        return self.series.coefficient(exponent)


def laurent_coefficients(ch: ModelChart, order: int = 6, config: QuadratureConfig = DEFAULT_CONFIG) -> LaurentData:
    """Laurent coefficients of F(s) at s = -alpha from log-moment products,
    with the pole-order estimate (at most k+1 for diagonal sections)."""
    series = mellin_series(ch, order=order, config=config)
    return LaurentData(series, series.pole_order(threshold=1e-8))


@dataclass
class PairingConstantResult:
    ratio: float
    target: float
    residue: float
    stratum_integral: float


def primitive_pairing_constant(
    ch: ModelChart, r: int, config: QuadratureConfig = DEFAULT_CONFIG
) -> PairingConstantResult:
    """Res_{s=-alpha} (-(s+alpha))^r F(s) divided by the weighted stratum
    integral, compared against (-1)^r / ((r+1)! C_J) for J the complement of
    the section support in the local index set."""
    if ch.K1 != ch.K2:
        raise ValueError("the pairing constant is a diagonal quantity")
    K = set(ch.K1)
    i_alpha = set(ch.local_index_set)
    J = sorted(i_alpha - K)  # the stratum indices: pole coordinates
    if len(K) != ch.mu - r:
        raise ValueError(f"sections of size {len(K)} do not match r = {r}")
    series = mellin_series(ch, order=r + 2, config=config)
    # Res (-sigma)^r F = (-1)^r [sigma^{-(r+1)}] F
    residue = ((-1.0) ** r) * series.coefficient(-(r + 1))
    profs = ch.profiles()
    stratum = 1.0
    for i in range(ch.k + 1):
        if i in J:
            continue
        c_i = _coordinate_exponent(ch, i, ch.K1)
        stratum *= log_moment(profs[i], 0, c_i, 1, config)
    for j in range(ch.k + 1, ch.n + 1):
        stratum *= profile_mass(profs[j], config)
    if stratum == 0:
        raise QuadratureNonconvergence("stratum integral vanishes")
    c_j = 1
    for i in J:
        c_j *= ch.multiplicities[i]
    target = ((-1.0) ** r) / (math.factorial(r + 1) * c_j)
    return PairingConstantResult(residue / stratum, target, residue, stratum)


@dataclass
class OffDiagonalResult:
    pole_order: int
    residue: float


def off_diagonal_vanishing(ch: ModelChart, config: QuadratureConfig = DEFAULT_CONFIG) -> OffDiagonalResult:
    """For K1 != K2 the angular integrals force every Laurent coefficient to
    vanish: the integrand carries z_v zbar_w monomials with v != w.  The
    angular factor is computed honestly per coordinate."""
    profs = ch.profiles()
    series = LaurentSeries(0, [1.0])
    for i in range(ch.k + 1):
        u = 1 if i in ch.K1 else 0
        v = 1 if i in ch.K2 else 0
        angular = 1.0 if u == v else 0.0
        c_i = min(
            _coordinate_exponent(ch, i, ch.K1), _coordinate_exponent(ch, i, ch.K2)
        ) + abs(u - v) * 0.5  # |z|^{u+v} contributes (u+v)/2 to the rho-exponent
        term = coordinate_series(profs[i], ch.multiplicities[i], c_i, ch.k + 3, config)
        series = series * term.scale(angular)
    for j in range(ch.k + 1, ch.n + 1):
        series = series.scale(profile_mass(profs[j], config))
    residue = series.coefficient(-1)
    return OffDiagonalResult(series.pole_order(threshold=1e-8), residue)


def operator_ratio_check(
    ch: ModelChart, j: int, s_sample: float, config: QuadratureConfig = DEFAULT_CONFIG
) -> tuple:
    """Ratio of the coordinate-j integral with the logarithmic derivative
    applied against the plain one, at a sample point s > -alpha: the exact
    answer is -(s + ceil(alpha e_j)/e_j)."""
    e_j = ch.multiplicities[j]
    ceil_aej = math.ceil(ch.alpha * e_j)
    prof = ch.profiles()[j]
    m = s_sample * e_j + ceil_aej

    def plain(x):
        return math.exp(-m * x) * float(prof.value(math.exp(-x)))

    def with_op(x):
        rho = math.exp(-x)
        return math.exp(-m * x) * rho * float(prof.d1(rho)) / e_j

    base = _quad(plain, 0.0, np.inf, config)
    applied = _quad(with_op, 0.0, np.inf, config)
    expected = -(s_sample + ceil_aej / e_j)
    return applied / base, expected
