"""Target densities on the unit ball and bounded integrands.

A density oracle evaluates an unnormalized, strictly positive density rho on
the closed d-dimensional unit ball, carries its declared log-Lipschitz
constant alpha, and claims logconcavity. Everything downstream consumes rho
only through log-density differences, so oracles expose ``log_density``
directly; densities spanning hundreds of orders of magnitude are fine.

The built-in mini-language::

    densities:   uniform | explin:a1,...,ad | gauss:c
    integrands:  one | coord:k | coord2:k | halfspace:k,t   (k is 1-based)

``explin:a`` is rho(x) = exp(a . x) with alpha = ||a||_2; ``gauss:c`` is
rho(x) = exp(-c ||x||^2) with alpha = 2c on the ball. All integrands are
bounded by 1 in sup norm on the ball by construction.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

# Slack for spot checks of the declared density class.
CLASS_CHECK_SLACK = 1e-9

DENSITY_UNIFORM = "uniform"
DENSITY_EXPLIN = "explin"
DENSITY_GAUSS = "gauss"

INTEGRAND_ONE = "one"
INTEGRAND_COORD = "coord"
INTEGRAND_COORD2 = "coord2"
INTEGRAND_HALFSPACE = "halfspace"


class DensityEvaluationError(RuntimeError):
    """Raised when a density oracle returns a non-finite or non-positive value."""


@dataclass(frozen=True)
class DensityOracle:
    """Evaluator of an unnormalized positive density on the unit ball.

    ``log_density`` maps a point (1-D float array of length ``dimension``) to
    log rho(x); ``alpha`` is the declared Lipschitz constant of log rho in the
    Euclidean norm. ``kind``/``params`` tag the built-in families so that the
    compiled sampling path can be used; general callables leave them None and
    take the pure-Python path. Evaluation must be pure and thread-safe.
    """

    log_density: Callable[[np.ndarray], float]
    dimension: int
    alpha: float
    logconcave_claimed: bool = True
    kind: Optional[str] = None
    params: Optional[np.ndarray] = None
    label: str = "custom"

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.alpha < 0.0:
            raise ValueError("alpha must be >= 0")
        if self.params is not None:
            frozen = np.array(self.params, dtype=float)
            frozen.setflags(write=False)
            object.__setattr__(self, "params", frozen)

    def log_density_checked(self, x):
        """log rho(x), raising DensityEvaluationError on non-finite output."""
        value = float(self.log_density(x))
        if not np.isfinite(value):
            raise DensityEvaluationError(
                f"log-density of '{self.label}' is {value!r} at {np.asarray(x).tolist()}"
            )
        return value

    def density(self, x):
        """rho(x) = exp(log_density(x)); may overflow for large alpha."""
        return float(np.exp(self.log_density_checked(x)))


def uniform_density(dimension):
    """The constant density rho = 1 (alpha = 0)."""
    return DensityOracle(
        log_density=lambda x: 0.0,
        dimension=dimension,
        alpha=0.0,
        kind=DENSITY_UNIFORM,
        params=np.zeros(0),
        label="uniform",
    )


def explin_density(coeffs):
    """rho(x) = exp(a . x); the declared alpha is ||a||_2 (tight by Cauchy-Schwarz)."""
    a = np.array(coeffs, dtype=float)
    if a.ndim != 1 or a.size < 1:
        raise ValueError("explin needs a nonempty coefficient vector")
    if not np.all(np.isfinite(a)):
        raise ValueError("explin coefficients must be finite")
    a.setflags(write=False)

    def log_density(x):
        # sequential product-sum; matches the compiled path bit for bit
        return float(np.sum(a * x))

    return DensityOracle(
        log_density=log_density,
        dimension=a.size,
        alpha=float(np.linalg.norm(a)),
        kind=DENSITY_EXPLIN,
        params=a,
        label="explin:" + ",".join(repr(float(c)) for c in a),
    )


def gauss_density(c, dimension):
    """rho(x) = exp(-c ||x||^2); on the unit ball the log-gradient norm is <= 2c."""
    c = float(c)
    if c < 0.0:
        raise ValueError("gauss concentration must be >= 0 for logconcavity")

    def log_density(x):
        return -c * float(np.sum(x * x))

    return DensityOracle(
        log_density=log_density,
        dimension=dimension,
        alpha=2.0 * c,
        kind=DENSITY_GAUSS,
        params=np.array([c]),
        label=f"gauss:{c!r}",
    )


def density_from_callable(fn, dimension, alpha, logconcave_claimed=True, log_scale=False, label="custom"):
    """Wrap an arbitrary density (or log-density when log_scale) evaluator."""
    if log_scale:
        log_density = lambda x: float(fn(x))
    else:
        def log_density(x):
            value = float(fn(x))
            if not (value > 0.0) or not np.isfinite(value):
                raise DensityEvaluationError(f"density '{label}' returned {value!r}")
            return float(np.log(value))

    return DensityOracle(
        log_density=log_density,
        dimension=dimension,
        alpha=alpha,
        logconcave_claimed=logconcave_claimed,
        label=label,
    )


def parse_density(spec, dimension):
    """Parse a density spec string (see module docstring) for a given dimension."""
    spec = spec.strip()
    if spec == DENSITY_UNIFORM:
        return uniform_density(dimension)
    if spec.startswith(DENSITY_EXPLIN + ":"):
        body = spec[len(DENSITY_EXPLIN) + 1 :]
        try:
            coeffs = [float(tok) for tok in body.split(",")]
        except ValueError as exc:
            raise ValueError(f"bad explin coefficients in {spec!r}") from exc
        if len(coeffs) != dimension:
            raise ValueError(f"explin expects {dimension} coefficients, got {len(coeffs)}")
        return explin_density(coeffs)
    if spec.startswith(DENSITY_GAUSS + ":"):
        body = spec[len(DENSITY_GAUSS) + 1 :]
        try:
            c = float(body)
        except ValueError as exc:
            raise ValueError(f"bad gauss concentration in {spec!r}") from exc
        return gauss_density(c, dimension)
    raise ValueError(f"unknown density spec {spec!r}")


@dataclass(frozen=True)
class Integrand:
    """A bounded integrand on the unit ball with a known sup-norm bound."""

    fn: Callable[[np.ndarray], float]
    sup_norm: float
    dimension: int
    kind: Optional[str] = None
    params: Optional[np.ndarray] = None
    label: str = "custom"

    def __post_init__(self):
        if self.params is not None:
            frozen = np.array(self.params, dtype=float)
            frozen.setflags(write=False)
            object.__setattr__(self, "params", frozen)

    def __call__(self, x):
        return float(self.fn(x))


def one_integrand(dimension):
    return Integrand(lambda x: 1.0, 1.0, dimension, INTEGRAND_ONE, np.zeros(0), "one")


def coord_integrand(k, dimension):
    """f(x) = x_k with 1-based coordinate index k."""
    if not 1 <= k <= dimension:
        raise ValueError(f"coordinate index {k} out of range for dimension {dimension}")
    idx = k - 1
    return Integrand(lambda x: float(x[idx]), 1.0, dimension, INTEGRAND_COORD, np.array([idx]), f"coord:{k}")


def coord2_integrand(k, dimension):
    """f(x) = x_k^2 with 1-based coordinate index k."""
    if not 1 <= k <= dimension:
        raise ValueError(f"coordinate index {k} out of range for dimension {dimension}")
    idx = k - 1
    # plain product, not **2: keeps the value bit-identical to the compiled path
    return Integrand(
        lambda x: float(x[idx]) * float(x[idx]), 1.0, dimension, INTEGRAND_COORD2, np.array([idx]), f"coord2:{k}"
    )


def halfspace_integrand(k, t, dimension):
    """f(x) = 1 if x_k <= t else 0, with 1-based coordinate index k."""
    if not 1 <= k <= dimension:
        raise ValueError(f"coordinate index {k} out of range for dimension {dimension}")
    idx = k - 1
    t = float(t)
    return Integrand(
        lambda x: 1.0 if x[idx] <= t else 0.0,
        1.0,
        dimension,
        INTEGRAND_HALFSPACE,
        np.array([idx, t]),
        f"halfspace:{k},{t!r}",
    )


def integrand_from_callable(fn, dimension, sup_norm, label="custom"):
    return Integrand(fn, float(sup_norm), dimension, label=label)


def parse_integrand(spec, dimension):
    """Parse an integrand spec string (see module docstring) for a given dimension."""
    spec = spec.strip()
    if spec == INTEGRAND_ONE:
        return one_integrand(dimension)
    for name, builder, arity in (
        (INTEGRAND_COORD, coord_integrand, 1),
        (INTEGRAND_COORD2, coord2_integrand, 1),
        (INTEGRAND_HALFSPACE, halfspace_integrand, 2),
    ):
        if spec.startswith(name + ":"):
            body = spec[len(name) + 1 :]
            toks = body.split(",")
            if len(toks) != arity:
                raise ValueError(f"{name} expects {arity} parameter(s) in {spec!r}")
            try:
                if name == INTEGRAND_HALFSPACE:
                    return builder(int(toks[0]), float(toks[1]), dimension)
                return builder(int(toks[0]), dimension)
            except ValueError as exc:
                raise ValueError(f"bad parameters in {spec!r}") from exc
    raise ValueError(f"unknown integrand spec {spec!r}")


@dataclass(frozen=True)
class DensityClassReport:
    """Outcome of spot-checking a density's declared class membership."""

    ok: bool
    witness: Optional[tuple] = None
    worst_excess: float = 0.0
    pairs_checked: int = 0


def verify_density_class(rho, pairs, rng):
    """Spot-check the declared log-Lipschitz constant and logconcavity of rho.

    Samples ``pairs`` random point pairs in the ball and tests
    |log rho(x) - log rho(y)| <= alpha ||x - y|| plus, when logconcavity is
    claimed, midpoint concavity of log rho. This is a necessary-condition
    check only: it can refute the declaration (returning the violating pair)
    but cannot certify it.
    """
    from .walk import uniform_ball_sample  # local import to avoid a cycle

    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    worst = 0.0
    for _ in range(pairs):
        x = uniform_ball_sample(rho.dimension, rng)
        y = uniform_ball_sample(rho.dimension, rng)
        lx = rho.log_density_checked(x)
        ly = rho.log_density_checked(y)
        gap = abs(lx - ly) - rho.alpha * float(np.linalg.norm(x - y))
        if gap > worst:
            worst = gap
        if gap > CLASS_CHECK_SLACK:
            return DensityClassReport(False, (x, y), gap, pairs)
        if rho.logconcave_claimed:
            mid = 0.5 * (x + y)
            sag = 0.5 * (lx + ly) - rho.log_density_checked(mid)
            if sag > worst:
                worst = sag
            if sag > CLASS_CHECK_SLACK:
                return DensityClassReport(False, (x, y), sag, pairs)
    return DensityClassReport(True, None, worst, pairs)
