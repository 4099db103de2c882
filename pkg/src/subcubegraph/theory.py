"""Closed-form probabilities and threshold exponents.

Notation: ``r = (1 + p) / 2`` is the probability that a binomial random
subcube contains a fixed point in one coordinate, and ``y = 2p / (1 + p)``.
Probabilities that are d-th powers of a one-coordinate quantity are
evaluated as ``exp(d * log(.))`` so that d in the hundreds does not underflow.
Thresholds are exponents x with n = e^{x d}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from .models import Binomial, ModelParams, Uniform

LOG2 = math.log(2.0)


def _xlogy(x: float, y: float) -> float:
    """x * log(y) with 0 * log(0) = 0."""
    if x == 0.0:
        return 0.0
    return x * math.log(y)


def binom(a: int, b: int) -> int:
    """Binomial coefficient; 0 whenever an argument is negative or b > a."""
    if a < 0 or b < 0 or b > a:
        return 0
    return math.comb(a, b)


def _check_p(p: float) -> None:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")


def _log_q1(s: int, p: float) -> float:
    """log(2 r^s - p^s): one-coordinate probability that s subcubes share a point."""
    r = (1.0 + p) / 2.0
    y = 2.0 * p / (1.0 + p)
    return s * math.log(r) + math.log(2.0 - y**s)


# -- binomial model: cliques ------------------------------------------------

def clique_prob_binomial(s: int, d: int, p: float) -> float:
    """P(a fixed s-set of vertices forms a clique) = (2 r^s - p^s)^d."""
    _check_p(p)
    if s < 1:
        raise ValueError("s must be >= 1")
    return math.exp(d * _log_q1(s, p))


def t_Ks_binomial(s: int, p: float) -> float:
    """Threshold exponent for s-cliques, -(1/s) log(2 r^s - p^s).  Equals 0 at p = 1."""
    _check_p(p)
    if s < 1:
        raise ValueError("s must be >= 1")
    q1 = 2.0 * ((1.0 + p) / 2.0) ** s - p**s
    if q1 > 1e-300:
        return -math.log(q1) / s
    return -_log_q1(s, p) / s


def t_Ks_binomial_corollary(s: int, p: float) -> float:
    """Same threshold in the form log(2/(1+p)) - (1/s) log(2 - (2p/(1+p))^s)."""
    _check_p(p)
    y = 2.0 * p / (1.0 + p)
    return math.log(2.0 / (1.0 + p)) - math.log(2.0 - y**s) / s


def joint_clique_prob(s: int, i: int, d: int, p: float) -> float:
    """P(two s-sets sharing exactly i vertices both form cliques)."""
    _check_p(p)
    if not 0 <= i <= s:
        raise ValueError("need 0 <= i <= s")
    r = (1.0 + p) / 2.0
    y = 2.0 * p / (1.0 + p)
    h = 2.0 + 2.0 * y**i - 4.0 * y**s + y ** (2 * s - i)
    return math.exp(d * ((2 * s - i) * math.log(r) + math.log(h)))


def expected_clique_count(n: int, s: int, d: int, p: float) -> float:
    return math.comb(n, s) * clique_prob_binomial(s, d, p)


# -- covering ---------------------------------------------------------------

def t_cover_binomial(p: float) -> float:
    _check_p(p)
    return math.log(2.0 / (1.0 + p))


def T_cover_uniform(alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return (1.0 - alpha) * LOG2


def cover_midpoint_binomial(d: int, p: float) -> float:
    """Finite-d covering location log(2/(1+p)) + (log d + log log 2)/d."""
    return t_cover_binomial(p) + (math.log(d) + math.log(LOG2)) / d


def cover_midpoint_uniform(d: int, alpha: float) -> float:
    return T_cover_uniform(alpha) + (math.log(d) + math.log(LOG2)) / d


def _log_pow_n(n: int, log1p_arg: float) -> float:
    """n * log1p(arg), with the n = 0 case defined as 0."""
    if n == 0:
        return 0.0
    if log1p_arg <= -1.0:
        return -math.inf
    return n * math.log1p(log1p_arg)


def expected_uncovered_binomial(n: int, d: int, p: float) -> float:
    """E|Q_d minus union of n binomial subcubes| = 2^d (1 - r^d)^n."""
    _check_p(p)
    rd = math.exp(d * math.log((1.0 + p) / 2.0))
    return math.exp(d * LOG2 + _log_pow_n(n, -rd))


def pair_uncovered_prob_binomial(n: int, d: int, p: float, i: int) -> float:
    """P(neither 0 nor e_[i] is covered), the two points being at Hamming distance i."""
    _check_p(p)
    if not 0 <= i <= d:
        raise ValueError("need 0 <= i <= d")
    r = (1.0 + p) / 2.0
    rd = math.exp(d * math.log(r))
    both = (p**i) * math.exp((d - i) * math.log(r))
    return math.exp(_log_pow_n(n, -(2.0 * rd - both)))


def expected_uncovered_uniform(n: int, d: int, k: int) -> float:
    if not 0 <= k <= d:
        raise ValueError("need 0 <= k <= d")
    return math.exp(d * LOG2 + _log_pow_n(n, -(2.0 ** (k - d))))


def pair_uncovered_prob_uniform(n: int, d: int, k: int, i: int) -> float:
    if not 0 <= k <= d or not 0 <= i <= d:
        raise ValueError("need 0 <= k <= d and 0 <= i <= d")
    one = 2.0 ** (k - d)
    both = binom(d - i, k - i) / math.comb(d, k) * one
    return math.exp(_log_pow_n(n, -(2.0 * one - both)))


def expected_volume(d: int, p: float) -> float:
    """E|f(v)| = (1 + p)^d."""
    _check_p(p)
    return (1.0 + p) ** d


def volume_variance(n: int, d: int, p: float) -> float:
    """Var of the total volume of n binomial subcubes: n((1+3p)^d - (1+p)^{2d})."""
    _check_p(p)
    return n * ((1.0 + 3.0 * p) ** d - (1.0 + p) ** (2 * d))


# -- dimension of vertices in the first cliques ------------------------------

def alpha_s(p: float, s: int) -> float:
    """Expected dimension fraction of a vertex in an s-clique: p q(s-1,1) / q(s,1)."""
    _check_p(p)
    if s < 1:
        raise ValueError("s must be >= 1")
    y = 2.0 * p / (1.0 + p)
    ys = y**s
    return (2.0 * y - ys) / (2.0 - ys)


def alpha_s_inverse(alpha: float, s: int, tol: float = 1e-13) -> float:
    """The p with alpha_s(p) = alpha, by bisection (alpha_s is strictly increasing)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    if alpha in (0.0, 1.0):
        return alpha
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if alpha_s(mid, s) < alpha:
            lo = mid
        else:
            hi = mid
    # finish to machine precision; cheap and keeps round trips well inside 1e-12
    for _ in range(8):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if alpha_s(mid, s) < alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def t_alpha_Ks(alpha: float, p: float, s: int) -> float:
    """Exponent governing s-cliques through a vertex of dimension alpha*d."""
    _check_p(p)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    r = (1.0 + p) / 2.0
    log_q = _log_q1(s - 1, p) if s > 1 else 0.0
    a_term = 0.0
    if alpha > 0.0:
        a_term = alpha * (math.log(p) + log_q) - _xlogy(alpha, alpha) if p > 0 else -math.inf
    b_term = 0.0
    if alpha < 1.0:
        b_term = (1.0 - alpha) * (math.log1p(-p) + (s - 1) * math.log(r)) - _xlogy(1.0 - alpha, 1.0 - alpha) \
            if p < 1 else -math.inf
    return -(a_term + b_term) / s


# -- uniform model -----------------------------------------------------------

def relative_entropy(a: float, p: float) -> float:
    """a log(a/p) + (1-a) log((1-a)/(1-p))."""
    out = 0.0
    if a > 0:
        out += a * math.log(a / p)
    if a < 1:
        out += (1 - a) * math.log((1 - a) / (1 - p))
    return out


def T_Ks_uniform(alpha: float, s: int) -> float:
    """s-clique threshold exponent of the uniform model with k = floor(alpha d)."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    p = alpha_s_inverse(alpha, s)
    return t_Ks_binomial(s, p) - relative_entropy(alpha, p)


def f_alpha_displayed(alpha: float) -> float:
    """The edge-density exponent expression exactly as printed in the source text.

    Numerically this is the negative of the true exponent (see ``f_alpha``).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    r = math.sqrt((1.0 - alpha) ** 2 + alpha**2)
    a = max(r - 1.0 + alpha, 0.0)
    b = max(1.0 - r, 0.0)
    c = max(r - alpha, 0.0)
    return (2.0 * (_xlogy(alpha, alpha) + _xlogy(1.0 - alpha, 1.0 - alpha))
            - _xlogy(a, a) - 2.0 * _xlogy(b, b) - _xlogy(c, 2.0 * c))


def f_alpha(alpha: float) -> float:
    """Edge-density exponent of the uniform model: q = e^{-f(alpha) d + o(d)}.

    f(0) = log 2 (two random points), f(1) = 0 (full cubes always meet).
    """
    return 0.0 - f_alpha_displayed(alpha)


def exact_uniform_edge_prob_fraction(d: int, k: int) -> Fraction:
    """Exact P(two uniform k-dimensional subcubes of Q_d meet)."""
    if not 0 <= k <= d:
        raise ValueError("need 0 <= k <= d")
    total = Fraction(0)
    ck = math.comb(d, k)
    for j in range(k + 1):
        both_fixed = d - 2 * k + j
        if both_fixed < 0:
            continue
        total += Fraction(math.comb(k, j) * binom(d - k, k - j), ck) / (1 << both_fixed)
    return total


def exact_uniform_edge_prob(d: int, k: int) -> float:
    return float(exact_uniform_edge_prob_fraction(d, k))


def log_exact_uniform_edge_prob(d: int, k: int) -> float:
    q = exact_uniform_edge_prob_fraction(d, k)
    return math.log(q.numerator) - math.log(q.denominator)


def binomial_edge_prob(d: int, p: float) -> float:
    """(1 - (1-p)^2 / 2)^d."""
    _check_p(p)
    return math.exp(d * math.log1p(-((1.0 - p) ** 2) / 2.0))


def c4_prob(d: int, p: float) -> float:
    """P(four labelled vertices v1..v4 carry the 4-cycle v1v2v3v4)."""
    _check_p(p)
    r = (1.0 + p) / 2.0
    return (2.0 * r**4 - p**4 + p**2 * (1.0 - p) ** 2) ** d


# -- the second-moment lemma ------------------------------------------------

def lemma_a_gap(y, i: int, s: int) -> float:
    """(2 - y^s)^(2s-i) - (2 + 2y^i - 4y^s + y^(2s-i))^s, which is >= 0 on [0, 1].

    Rational y (Fraction, int) is evaluated exactly and then rounded; float y
    goes through logarithms so large s does not overflow.
    """
    if not 0 <= i <= s:
        raise ValueError("need 0 <= i <= s")
    if isinstance(y, Rational):
        y = Fraction(y)
        if not 0 <= y <= 1:
            raise ValueError("y must lie in [0, 1]")
        a, m = y.numerator, y.denominator
        # both sides share the denominator m^(s(2s-i))
        left = (2 * m**s - a**s) ** (2 * s - i)
        h = 2 * m ** (2 * s - i) + 2 * a**i * m ** (2 * s - 2 * i) - 4 * a**s * m ** (s - i) + a ** (2 * s - i)
        return float(Fraction(left - h**s, m ** (s * (2 * s - i))))
    y = float(y)
    if not 0.0 <= y <= 1.0:
        raise ValueError("y must lie in [0, 1]")
    u = y**s
    h = 2.0 + 2.0 * y**i - 4.0 * u + y ** (2 * s - i)
    la = (2 * s - i) * math.log(2.0 - u)
    lb = s * math.log(h)
    return math.exp(lb) * math.expm1(la - lb)


def lemma_a_log_gap(y: float, i: int, s: int) -> float:
    """(2s-i) log(2 - y^s) - s log(2 + 2y^i - 4y^s + y^(2s-i)); >= 0 iff the lemma holds."""
    u = y**s
    h = 2.0 + 2.0 * y**i - 4.0 * u + y ** (2 * s - i)
    return (2 * s - i) * math.log(2.0 - u) - s * math.log(h)


# -- regimes of the clique number -------------------------------------------

@dataclass(frozen=True)
class Regime:
    kind: str  # "fixed" | "boundary" | "polylog" | "exponential"
    value: float

    def __str__(self) -> str:
        v = int(self.value) if self.kind in ("fixed", "boundary") else round(self.value, 6)
        return f"{self.kind.capitalize()}({v})"


def _ladder(params: ModelParams):
    if isinstance(params, Binomial):
        return (lambda s: t_Ks_binomial(s, params.p)), t_cover_binomial(params.p)
    alpha = params.alpha
    if not 0.0 < alpha < 1.0:
        raise ValueError("uniform regimes need 0 < k < d")
    return (lambda s: T_Ks_uniform(alpha, s)), T_cover_uniform(alpha)


def clique_regime(x: float, params: ModelParams, window: float = 0.0, polylog_max: float = 2.0,
                  s_cap: int = 10**9) -> Regime:
    """Where n = e^{xd} sits on the clique-number ladder.

    Below the covering exponent: Fixed(s) for thresholds t_s <= x < t_{s+1}, or
    Boundary(s) if x is within ``window`` of t_s.  Above it, with
    x = cover + gamma log(d)/d: Polylog(gamma) while gamma <= polylog_max,
    else Exponential(x - cover).
    """
    if x < 0:
        raise ValueError("x must be non-negative")
    thr, cover = _ladder(params)
    if x >= cover:
        c = x - cover
        d = params.d
        if d >= 2:
            gamma = c * d / math.log(d)
            if gamma <= polylog_max:
                return Regime("polylog", gamma)
        return Regime("exponential", c)
    lo, hi = 1, 2
    while thr(hi) <= x:
        lo, hi = hi, 2 * hi
        if hi > s_cap:
            return Regime("polylog", 0.0)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if thr(mid) <= x:
            lo = mid
        else:
            hi = mid
    s = lo
    if window > 0:
        if abs(x - thr(s)) < window and s > 1:
            return Regime("boundary", s)
        if abs(thr(s + 1) - x) < window:
            return Regime("boundary", s + 1)
    return Regime("fixed", s)


def threshold_rows(model: str, s_values, value: float):
    """Rows (model, s, p_or_alpha, t_Ks, t_cover, alpha_s) for the thresholds table.

    For uniform rows the alpha_s column holds the matching binomial p = alpha_s^{-1}(alpha).
    """
    rows = []
    for s in s_values:
        if model == "binomial":
            rows.append(("binomial", s, value, t_Ks_binomial(s, value), t_cover_binomial(value), alpha_s(value, s)))
        elif model == "uniform":
            rows.append(("uniform", s, value, T_Ks_uniform(value, s), T_cover_uniform(value),
                         alpha_s_inverse(value, s)))
        else:
            raise ValueError(f"unknown model {model!r}")
    return rows


def edge_density_exponent_binomial(p: float) -> float:
    """log(2 / (1 + 2p - p^2)): the binomial edge probability is e^{-d * this}."""
    return math.log(2.0 / (1.0 + 2.0 * p - p * p))


def threshold_for(params: ModelParams, prop) -> float:
    """Predicted threshold exponent for a Clique(s) or Cover property."""
    from .analysis import Clique, Cover

    if isinstance(prop, Cover):
        return t_cover_binomial(params.p) if isinstance(params, Binomial) else T_cover_uniform(params.alpha)
    if isinstance(prop, Clique):
        if isinstance(params, Binomial):
            return t_Ks_binomial(prop.s, params.p)
        if prop.s == 1:
            return 0.0
        return T_Ks_uniform(params.alpha, prop.s)
    raise TypeError(prop)


def clique_midpoint_binomial(s: int, d: int, p: float) -> float:
    """x at which the expected number of s-cliques is log 2 (Poisson heuristic for P = 1/2)."""
    lq = d * _log_q1(s, p)
    # C(n, s) q = log 2, solved with C(n, s) ~ n^s / s!
    return (math.log(LOG2) + math.lgamma(s + 1) - lq) / (s * d)


def uniform_alpha_from_k(d: int, k: int) -> float:
    return Uniform(d, k).alpha
