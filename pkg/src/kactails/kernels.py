"""Collision kernels: samplable laws of a non-negative pair (L, R).

The spectral data of a kernel,

    Q(s)  = E[L^s + R^s] - 1        (convention 0^0 = 0)
    mu(s) = Q(s) / s                (s > 0),

drive everything downstream: mu(alpha) is the self-similar rescaling rate,
and the relative position of mu(2*alpha) versus mu(alpha), together with
the sign of 2*Q(alpha) + 1, selects the growth function h(t) that an
admissible threshold schedule x_t must outpace.

Kernels are immutable after construction and safe to share across workers;
sampling always goes through a caller-provided numpy Generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

_SQRT_PI = math.sqrt(math.pi)

# case-id values for Regime.  The slug encodes the position of mu(2a)
# relative to mu(a) ("down" = strictly smaller, "up" = strictly larger,
# "flat" = equal within tolerance) and the position of 2*Q(a) relative
# to -1 where it matters.
CASE_UNRESTRICTED = "unrestricted"
CASE_DOWN_CRITICAL = "mu-down-critical"    # mu(2a) < mu(a), 2Q(a) = -1  -> h(t) = t
CASE_DOWN_STEEP = "mu-down-steep"          # mu(2a) < mu(a), 2Q(a) < -1  -> exp(-(2Q(a)+1) t)
CASE_UP = "mu-up"                          # mu(2a) > mu(a)              -> exp((Q(2a)-2Q(a)) t)
CASE_FLAT_POSITIVE = "mu-flat-positive"    # mu(2a) = mu(a), Q(a) > 0    -> exp(eta t)
CASE_FLAT_STEEP = "mu-flat-steep"          # mu(2a) = mu(a), 2Q(a) < -1  -> t exp(-(2Q(a)+1) t)
CASE_FLAT_CRITICAL = "mu-flat-critical"    # mu(2a) = mu(a), 2Q(a) = -1  -> t^2
CASE_FLAT_MODERATE = "mu-flat-moderate"    # mu(2a) = mu(a), -1 < 2Q(a) <= 0 -> t

ALL_CASES = (
    CASE_UNRESTRICTED,
    CASE_DOWN_CRITICAL,
    CASE_DOWN_STEEP,
    CASE_UP,
    CASE_FLAT_POSITIVE,
    CASE_FLAT_STEEP,
    CASE_FLAT_CRITICAL,
    CASE_FLAT_MODERATE,
)


class RegimeUnavailableError(ValueError):
    """Q(2*alpha) is infinite, so no tail-regime classification exists."""


class CollisionKernel:
    """Base interface.  Concrete kernels implement sample() and pair_moment()."""

    kind = "abstract"

    def sample(self, rng: np.random.Generator, size: int | None = None):
        """Draw (L, R).  Scalars when size is None, float arrays otherwise."""
        raise NotImplementedError

    def pair_moment(self, s: float) -> float | None:
        """E[L^s + R^s] in closed form, or None when unavailable."""
        return None


@dataclass(frozen=True)
class DeterministicKernel(CollisionKernel):
    """Degenerate kernel: (L, R) = (l, r) on every draw."""

    l: float
    r: float
    kind = "deterministic"

    def __post_init__(self):
        if self.l < 0 or self.r < 0:
            raise ValueError("collision coefficients must be non-negative")
        if not (self.l > 0 and self.r > 0):
            # standing assumption P{L>0} + P{R>0} > 1
            raise ValueError("deterministic kernel needs l > 0 and r > 0")

    def sample(self, rng, size=None):
        if size is None:
            return self.l, self.r
        return np.full(size, self.l), np.full(size, self.r)

    def pair_moment(self, s):
        return self.l ** s + self.r ** s


@dataclass(frozen=True)
class KacKernel(CollisionKernel):
    """L = |sin(theta)|, R = |cos(theta)| with theta uniform on [0, 2*pi).

    Absolute values keep the pair non-negative; the squared pair still
    satisfies L^2 + R^2 = 1 on every draw, so Q(2) = 0 exactly.
    """

    kind = "kac"

    def sample(self, rng, size=None):
        theta = rng.uniform(0.0, 2.0 * math.pi, size)
        if size is None:
            return abs(math.sin(theta)), abs(math.cos(theta))
        return np.abs(np.sin(theta)), np.abs(np.cos(theta))

    def pair_moment(self, s):
        if s == 2.0:
            return 1.0  # L^2 + R^2 = 1 on every draw
        # E|sin|^s = E|cos|^s = Gamma((s+1)/2) / (sqrt(pi) Gamma(s/2 + 1))
        return 2.0 * math.gamma((s + 1.0) / 2.0) / (_SQRT_PI * math.gamma(s / 2.0 + 1.0))


@dataclass(frozen=True)
class DiscreteKernel(CollisionKernel):
    """Finite mixture of deterministic pairs: P{(L,R) = atoms[i]} = probs[i]."""

    atoms: tuple[tuple[float, float], ...]
    probs: tuple[float, ...]
    kind = "discrete-mixture"

    def __post_init__(self):
        atoms = tuple((float(l), float(r)) for l, r in self.atoms)
        probs = tuple(float(p) for p in self.probs)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "probs", probs)
        if len(atoms) != len(probs) or not atoms:
            raise ValueError("atoms and probs must be non-empty and of equal length")
        if any(p <= 0 for p in probs) or abs(sum(probs) - 1.0) > 1e-12:
            raise ValueError("probabilities must be positive and sum to 1")
        if any(l < 0 or r < 0 for l, r in atoms):
            raise ValueError("collision coefficients must be non-negative")
        p_l = sum(p for (l, _), p in zip(atoms, probs) if l > 0)
        p_r = sum(p for (_, r), p in zip(atoms, probs) if r > 0)
        if not p_l + p_r > 1.0:
            raise ValueError("kernel must satisfy P{L>0} + P{R>0} > 1")
        cum = np.cumsum(probs)
        cum[-1] = 1.0
        ls = np.array([l for l, _ in atoms])
        rs = np.array([r for _, r in atoms])
        object.__setattr__(self, "_cum", cum)
        object.__setattr__(self, "_ls", ls)
        object.__setattr__(self, "_rs", rs)

    def sample(self, rng, size=None):
        u = rng.random(size)
        idx = np.searchsorted(self._cum, u, side="right")
        if size is None:
            return float(self._ls[idx]), float(self._rs[idx])
        return self._ls[idx], self._rs[idx]

    def pair_moment(self, s):
        # 0^s = 0 for s > 0, matching the 0^0 = 0 convention as s -> 0
        return float(sum(p * (l ** s + r ** s) for (l, r), p in zip(self.atoms, self.probs)))


class UserKernel(CollisionKernel):
    """Caller-supplied sampler, with an optional closed-form pair moment.

    The sampler must accept (rng, size) and return a pair of non-negative
    arrays; the standing assumption P{L>0} + P{R>0} > 1 is the caller's
    responsibility.
    """

    kind = "user"

    def __init__(self, sampler: Callable, moment: Callable[[float], float] | None = None):
        self._sampler = sampler
        self._moment = moment

    def sample(self, rng, size=None):
        if size is None:
            l, r = self._sampler(rng, 1)
            return float(np.asarray(l).ravel()[0]), float(np.asarray(r).ravel()[0])
        l, r = self._sampler(rng, size)
        return np.asarray(l, dtype=float), np.asarray(r, dtype=float)

    def pair_moment(self, s):
        return None if self._moment is None else float(self._moment(s))


def sample_collision(kernel: CollisionKernel, rng: np.random.Generator):
    """One i.i.d. draw of the pair (L, R)."""
    return kernel.sample(rng)


@dataclass(frozen=True)
class SpectralReport:
    s: float
    Q_s: float
    mu_s: float
    method: str          # "closed-form" | "quadrature" | "monte-carlo"
    std_error: float


def spectral(kernel, s, budget=None, method=None, rng=None) -> SpectralReport:
    """Estimate Q(s) = E[L^s + R^s] - 1 and mu(s) = Q(s)/s.

    Uses the kernel's closed form when available.  The quadrature route
    exists for the kac kernel only and integrates the angle density
    directly (an independent check of the Gamma-function closed form).
    Monte Carlo requires a budget of at least 1000 draws and flags a
    diverging moment (heavy single-draw dominance) as Q_s = +inf.
    """
    if s <= 0:
        raise ValueError("spectral data defined for s > 0 only")
    if method is None:
        method = "closed-form" if kernel.pair_moment(s) is not None else "monte-carlo"

    if method == "closed-form":
        m = kernel.pair_moment(s)
        if m is None:
            raise ValueError(f"{kernel.kind} kernel has no closed-form moment")
        q = m - 1.0
        return SpectralReport(s, q, q / s, "closed-form", 0.0)

    if method == "quadrature":
        if not isinstance(kernel, KacKernel):
            raise ValueError("quadrature is implemented for the kac kernel only")
        from scipy import integrate

        nodes = int(budget) if budget else 2048
        theta = (np.arange(nodes) + 0.5) * (2.0 * math.pi / nodes)
        vals = np.abs(np.sin(theta)) ** s + np.abs(np.cos(theta)) ** s
        coarse = float(vals.mean()) - 1.0
        fine, err = integrate.quad(
            lambda th: (abs(math.sin(th)) ** s + abs(math.cos(th)) ** s) / (2.0 * math.pi),
            0.0, 2.0 * math.pi, limit=200,
        )
        q = fine - 1.0
        return SpectralReport(s, q, q / s, "quadrature", max(err, abs(fine - 1.0 - coarse)))

    if method != "monte-carlo":
        raise ValueError(f"unknown spectral method {method!r}")
    if rng is None:
        raise ValueError("monte-carlo spectral estimation needs an rng")
    n = int(budget) if budget else 100_000
    if n < 1000:
        raise ValueError("monte-carlo spectral budget must be >= 1000")
    L, R = kernel.sample(rng, n)
    vals = L ** s + R ** s
    total = float(vals.sum())
    if not np.isfinite(total) or (total > 0 and float(vals.max()) > 0.5 * total):
        # a single draw carrying most of the mass is the signature of an
        # infinite moment at this sample size
        return SpectralReport(s, math.inf, math.inf, "monte-carlo", math.inf)
    q = total / n - 1.0
    se = float(vals.std(ddof=1)) / math.sqrt(n)
    return SpectralReport(s, q, q / s, "monte-carlo", se)


@dataclass(frozen=True)
class Regime:
    """Spectral classification of (kernel, alpha) for threshold schedules."""

    alpha: float
    S_alpha: float
    S_2alpha: float
    mu_alpha: float
    mu_2alpha: float
    case_id: str
    eta: float = 0.1
    tol: float = 1e-9


def classify_regime(kernel, alpha, eta=0.1, tol=1e-9, rng=None, budget=200_000) -> Regime:
    """Compute Q(alpha), Q(2*alpha) and pick the matching case-id.

    Equality comparisons (mu(2a) = mu(a), 2Q(a) in {-1, 0}) are resolved
    within the relative tolerance `tol`.  Raises RegimeUnavailableError
    when Q(2*alpha) is infinite.
    """
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    if eta <= 0:
        raise ValueError("eta must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    s_a = spectral(kernel, alpha, budget=budget, rng=rng).Q_s
    s_2a = spectral(kernel, 2.0 * alpha, budget=budget, rng=rng).Q_s
    if not math.isfinite(s_2a) or not math.isfinite(s_a):
        raise RegimeUnavailableError(
            f"Q({2 * alpha:g}) is not finite; no regime classification applies"
        )
    mu_a = s_a / alpha
    mu_2a = s_2a / (2.0 * alpha)

    def close(x, y):
        return abs(x - y) <= tol * max(1.0, abs(x), abs(y))

    two_s = 2.0 * s_a
    if close(mu_2a, mu_a):
        if s_a > 0 and not close(s_a, 0.0):
            case = CASE_FLAT_POSITIVE
        elif close(two_s, -1.0):
            case = CASE_FLAT_CRITICAL
        elif two_s < -1.0:
            case = CASE_FLAT_STEEP
        else:
            case = CASE_FLAT_MODERATE
    elif mu_2a > mu_a:
        case = CASE_UP
    elif close(two_s, -1.0):
        case = CASE_DOWN_CRITICAL
    elif two_s < -1.0:
        case = CASE_DOWN_STEEP
    else:
        case = CASE_UNRESTRICTED
    return Regime(alpha, s_a, s_2a, mu_a, mu_2a, case, eta, tol)


def h_of_t(regime: Regime, t: float) -> float:
    """Growth function of the regime; 1 for the unrestricted case."""
    if t < 0:
        raise ValueError("t must be non-negative")
    c = regime.case_id
    if c == CASE_UNRESTRICTED:
        return 1.0
    if c in (CASE_DOWN_CRITICAL, CASE_FLAT_MODERATE):
        return t
    if c == CASE_DOWN_STEEP:
        return math.exp(-(2.0 * regime.S_alpha + 1.0) * t)
    if c == CASE_UP:
        return math.exp((regime.S_2alpha - 2.0 * regime.S_alpha) * t)
    if c == CASE_FLAT_POSITIVE:
        return math.exp(regime.eta * t)
    if c == CASE_FLAT_STEEP:
        return t * math.exp(-(2.0 * regime.S_alpha + 1.0) * t)
    if c == CASE_FLAT_CRITICAL:
        return t * t
    raise ValueError(f"unknown case id {c!r}")


def log_h_of_t(regime: Regime, t: float) -> float:
    """log h(t); preferred for schedule witnesses since h can overflow."""
    if t < 0:
        raise ValueError("t must be non-negative")
    c = regime.case_id
    if c == CASE_UNRESTRICTED:
        return 0.0
    if c in (CASE_DOWN_CRITICAL, CASE_FLAT_MODERATE):
        return math.log(t) if t > 0 else -math.inf
    if c == CASE_DOWN_STEEP:
        return -(2.0 * regime.S_alpha + 1.0) * t
    if c == CASE_UP:
        # 2*alpha*(mu(2a) - mu(a)) = Q(2a) - 2 Q(a)
        return (regime.S_2alpha - 2.0 * regime.S_alpha) * t
    if c == CASE_FLAT_POSITIVE:
        return regime.eta * t
    if c == CASE_FLAT_STEEP:
        lt = math.log(t) if t > 0 else -math.inf
        return lt - (2.0 * regime.S_alpha + 1.0) * t
    if c == CASE_FLAT_CRITICAL:
        return 2.0 * math.log(t) if t > 0 else -math.inf
    raise ValueError(f"unknown case id {c!r}")
