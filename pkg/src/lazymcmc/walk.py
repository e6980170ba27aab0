"""Lazy Metropolis ball walk on the d-dimensional unit ball.

The proposal is a uniform draw in the radius-delta ball around the current
point; proposals leaving the unit ball are rejected in place, interior
proposals are accepted with probability min{1, rho(y)/rho(x)} evaluated in
log space, and a fair coin consumed before anything else holds the chain in
place (laziness). A discrete Metropolis-kernel constructor is included so
the same acceptance rule can be verified exactly on finite chains.

RNG contract (bit-for-bit reproducible given a 64-bit seed): streams are
``numpy.random.default_rng(seed)`` (PCG64). Each step consumes, in order:

1. one uniform (laziness coin; the step ends here when coin < 1/2),
2. d standard normals plus one uniform (the ball proposal; the step ends
   here on boundary rejection),
3. one uniform (acceptance; drawn even when the density ratio exceeds 1).

Uniform-in-ball draws use d standard normals scaled to the unit sphere and
a radius factor U^(1/d); no rejection sampling, so draw counts per step are
exactly as listed. The compiled fast path consumes the same generator in
the same order and produces bit-identical trajectories.
"""

import math
from dataclasses import dataclass

import numpy as np

from .chain import DiscreteKernel

BALL_DIAMETER = 2.0


def delta_choice(d, alpha):
    """The tuned proposal radius min{1/sqrt(d+1), 1/alpha} (1/alpha = inf at 0)."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    inv_root = 1.0 / math.sqrt(d + 1.0)
    if alpha == 0.0:
        return inv_root
    return min(inv_root, 1.0 / alpha)


@dataclass(frozen=True)
class WalkConfig:
    """Step radius, dimension, and seed of one ball-walk chain."""

    dimension: int
    delta: float
    seed: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if not 0.0 < self.delta <= BALL_DIAMETER:
            raise ValueError(f"delta must lie in (0, {BALL_DIAMETER}], got {self.delta!r}")


@dataclass
class ChainState:
    """Current position (inside the closed unit ball) and step count."""

    position: np.ndarray
    step_count: int = 0

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        if float(np.sum(self.position * self.position)) > 1.0 + 1e-12:
            raise ValueError("position must lie in the closed unit ball")
        if self.step_count < 0:
            raise ValueError("step_count must be >= 0")

    def advanced(self, position):
        """The state after one transition to ``position``."""
        return ChainState(position, self.step_count + 1)


@dataclass
class StepCounters:
    """Mutable tallies of what the step functions did (diagnostics only)."""

    lazy_holds: int = 0
    proposals: int = 0
    boundary_rejections: int = 0
    metropolis_rejections: int = 0
    acceptances: int = 0
    rho_evaluations: int = 0


def uniform_ball_sample(d, rng):
    """A point uniform in the closed unit ball of dimension d."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    z = rng.standard_normal(d)
    norm2 = float(np.sum(z * z))
    while norm2 == 0.0:
        z = rng.standard_normal(d)
        norm2 = float(np.sum(z * z))
    u = rng.random()
    c = (u ** (1.0 / d)) / math.sqrt(norm2)
    return c * z


def _propose(x, delta, d, rng):
    """One ball-walk proposal draw; returns (point, inside_flag).

    The returned point is the fresh draw when it is certifiably inside the
    closed unit ball and x itself otherwise (boundary rejection).
    """
    z = rng.standard_normal(d)
    norm2 = float(np.sum(z * z))
    while norm2 == 0.0:
        z = rng.standard_normal(d)
        norm2 = float(np.sum(z * z))
    u = rng.random()
    c = delta * (u ** (1.0 / d)) / math.sqrt(norm2)
    y = x + c * z
    if float(np.sum(y * y)) <= 1.0:
        return y, True
    return x, False


def ball_walk_propose(x, cfg, rng):
    """One step of the raw delta ball walk: uniform in B(x, delta), or hold.

    Draws y uniform in the radius-delta ball around x and returns it when it
    lies in the closed unit ball; otherwise returns x (the exterior proposal
    mass sits on the diagonal of the walk's kernel).
    """
    x = np.asarray(x, dtype=float)
    y, _ = _propose(x, cfg.delta, cfg.dimension, rng)
    return y


def _accept(log_ratio, rng):
    # Acceptance compares the (possibly > 1) density ratio against one
    # uniform draw, in log space: u = 0 always accepts since rho > 0.
    u = rng.random()
    return u == 0.0 or math.log(u) <= log_ratio


def _metro_step_memo(x, log_rho_x, rho, delta, rng, counters=None):
    """Metropolis step reusing the memoized log rho(x); returns (x', log rho(x'))."""
    d = rho.dimension
    y, inside = _propose(x, delta, d, rng)
    if counters is not None:
        counters.proposals += 1
    if not inside:
        if counters is not None:
            counters.boundary_rejections += 1
        return x, log_rho_x
    log_rho_y = rho.log_density_checked(y)
    if counters is not None:
        counters.rho_evaluations += 1
    if _accept(log_rho_y - log_rho_x, rng):
        if counters is not None:
            counters.acceptances += 1
        return y, log_rho_y
    if counters is not None:
        counters.metropolis_rejections += 1
    return x, log_rho_x


def metro_step(x, rho, cfg, rng, counters=None, log_rho_x=None):
    """One Metropolis step from x: ball-walk proposal plus accept/reject.

    Evaluates rho exactly once (for the proposed point) when ``log_rho_x``
    carries the memoized log-density of the current point; otherwise the
    current point is evaluated too.
    """
    x = np.asarray(x, dtype=float)
    if log_rho_x is None:
        log_rho_x = rho.log_density_checked(x)
        if counters is not None:
            counters.rho_evaluations += 1
    x_next, _ = _metro_step_memo(x, log_rho_x, rho, cfg.delta, rng, counters)
    return x_next


def lazy_metro_step(x, rho, cfg, rng, counters=None, log_rho_x=None):
    """One lazy Metropolis step: hold with probability 1/2, else metro_step.

    The laziness coin is consumed before any proposal randomness, and the
    holding branch performs no density evaluation.
    """
    x = np.asarray(x, dtype=float)
    coin = rng.random()
    if coin < 0.5:
        if counters is not None:
            counters.lazy_holds += 1
        return x
    return metro_step(x, rho, cfg, rng, counters, log_rho_x)


def _lazy_step_memo(x, log_rho_x, rho, delta, rng, counters=None):
    coin = rng.random()
    if coin < 0.5:
        if counters is not None:
            counters.lazy_holds += 1
        return x, log_rho_x
    return _metro_step_memo(x, log_rho_x, rho, delta, rng, counters)


def build_metropolis_kernel(proposal, rho):
    """The discrete Metropolis kernel for proposal Q and positive weights rho.

    Off-diagonal entries are min{1, rho_j/rho_i} Q[i, j]; the diagonal absorbs
    all rejected mass, so rows sum to one by construction. When Q is
    reversible w.r.t. mu, the result is reversible w.r.t. the reweighted
    target proportional to mu_i rho_i.
    """
    rho = np.asarray(rho, dtype=float)
    if rho.ndim != 1 or rho.shape[0] != proposal.size:
        raise ValueError("rho must be a vector matching the proposal's state count")
    if not np.all(np.isfinite(rho)) or rho.min() <= 0.0:
        raise ValueError("rho must be strictly positive and finite")
    theta = np.minimum(1.0, rho[None, :] / rho[:, None])
    kernel = proposal.matrix * theta
    # diagonal terms of the rejected mass vanish exactly (theta_ii = 1)
    rejected_mass = (proposal.matrix * (1.0 - theta)).sum(axis=1)
    kernel[np.diag_indices_from(kernel)] = proposal.matrix.diagonal() + rejected_mass
    return DiscreteKernel(kernel)


def reweighted_target(mu, rho):
    """The normalized target proportional to mu_i rho_i (as a plain array)."""
    mu = np.asarray(mu, dtype=float)
    rho = np.asarray(rho, dtype=float)
    weights = mu * rho
    return weights / weights.sum()
