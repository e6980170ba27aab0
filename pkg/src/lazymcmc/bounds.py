"""Closed-form conductance, mixing, error, burn-in, and cost bounds.

Every function here is a pure formula evaluated exactly as stated, plus one
exact oracle: conductance of a finite chain by full subset enumeration. The
ball-walk planning helpers combine the conductance lower bound for the
Metropolis ball walk on the unit ball with the general error bound, and
report both the headline-constant form and the tighter composed form.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .chain import IDENTITY_TOL, check_stationarity
from .walk import delta_choice

# Practical ceiling for 2^s subset enumeration.
ENUMERATION_MAX_STATES = 20
# Masks are enumerated in blocks of this size to bound memory at s near the cap.
ENUMERATION_CHUNK = 1 << 16
# Admissibility slack for subset mass sums (float accumulation of pi(A) = 1/2).
HALF_MASS_SLACK = 1e-12

# Constants of the ball-walk analysis. CONDUCTANCE_COEFF is the lower-bound
# prefactor before lazification; the headline error and burn-in constants
# are exactly 2*5/(COEFF/2) and 8/COEFF^2.
BALL_CONDUCTANCE_COEFF = 0.0025
BALL_ERROR_CONSTANT = 8000.0
BALL_BURNIN_CONSTANT = 1280000.0
BALL_COST_CONSTANT = 64000000.0


def _ceil_snapped(x):
    """Ceiling with a 1e-9 relative snap to the nearest integer.

    log(exp(2))/0.1**2 evaluates to 200.0000000000001 in doubles; the snap
    keeps such analytically-integer quantities from being ceiled upward.
    """
    nearest = round(x)
    if abs(x - nearest) <= 1e-9 * max(1.0, abs(x)):
        return int(nearest)
    return int(math.ceil(x))


@dataclass(frozen=True)
class ConductanceValue:
    """Exact conductance of a finite chain with the minimizing subset.

    ``by_convention`` marks the single-state chain, where no subset has mass
    in (0, 1/2] and phi is defined as 1.
    """

    phi: float
    witness_set: Optional[tuple] = None
    by_convention: bool = False


def conductance_exact(kernel, pi):
    """Exact conductance by enumeration of all subsets with 0 < pi(A) <= 1/2.

    phi = min over admissible A of flow(A -> complement) / pi(A), with flows
    pi_i K[i, j]. Ties are broken by the lexicographically smallest witness
    (subsets as sorted index tuples). Requires pi stationary and at most
    ``ENUMERATION_MAX_STATES`` states (the enumeration is 2^s).
    """
    s = kernel.size
    if s > ENUMERATION_MAX_STATES:
        raise ValueError(
            f"exact conductance enumerates 2^s subsets; s = {s} exceeds the cap of "
            f"{ENUMERATION_MAX_STATES} states"
        )
    if not check_stationarity(kernel, pi, IDENTITY_TOL):
        raise ValueError("pi is not stationary for the kernel")
    if s == 1:
        return ConductanceValue(1.0, None, by_convention=True)

    flows = pi.weights[:, None] * kernel.matrix
    row_mass = flows.sum(axis=1)

    best_ratio = math.inf
    best_mask = None
    chunk = ENUMERATION_CHUNK
    n_masks = 1 << s
    bit_cols = np.arange(s, dtype=np.uint32)
    for start in range(1, n_masks, chunk):
        stop = min(start + chunk, n_masks)
        masks = np.arange(start, stop, dtype=np.uint32)
        indicators = ((masks[:, None] >> bit_cols[None, :]) & 1).astype(float)
        mass = indicators @ pi.weights
        admissible = (mass > 0.0) & (mass <= 0.5 + HALF_MASS_SLACK)
        if not np.any(admissible):
            continue
        inflow = indicators @ row_mass  # total flow out of rows of A
        internal = np.einsum("ij,ij->i", indicators @ flows, indicators)
        ratio = np.full(masks.shape, math.inf)
        ratio[admissible] = (inflow[admissible] - internal[admissible]) / mass[admissible]
        idx = int(np.argmin(ratio))
        if ratio[idx] < best_ratio:
            # rescan the chunk for exact ties with the new minimum
            best_ratio = float(ratio[idx])
            ties = np.flatnonzero(ratio == best_ratio)
            best_mask = min(_mask_to_tuple(int(masks[t]), s) for t in ties)
        elif ratio[idx] == best_ratio and best_mask is not None:
            ties = np.flatnonzero(ratio == best_ratio)
            candidate = min(_mask_to_tuple(int(masks[t]), s) for t in ties)
            best_mask = min(best_mask, candidate)

    if best_mask is None:
        # pi so degenerate that no subset has mass in (0, 1/2]; same convention
        # as the single-state chain
        return ConductanceValue(1.0, None, by_convention=True)
    # numerical dust: a flow ratio is a quotient of nonnegative numbers
    phi = min(max(best_ratio, 0.0), 1.0)
    return ConductanceValue(float(phi), best_mask)


def _mask_to_tuple(mask, s):
    return tuple(i for i in range(s) if (mask >> i) & 1)


def lazification_conductance(phi):
    """Certified conductance lower bound after lazification: phi / 2."""
    if not 0.0 <= phi <= 1.0:
        raise ValueError("phi must lie in [0, 1]")
    return 0.5 * phi


def mixing_bound(phi, density_bound, j):
    """sqrt(M) (1 - phi^2/2)^j: convergence-to-stationarity bound at step j."""
    _validate_phi_density(phi, density_bound)
    if j < 0:
        raise ValueError("j must be >= 0")
    return math.sqrt(density_bound) * (1.0 - 0.5 * phi * phi) ** j


def mixing_bound_exp(phi, density_bound, j):
    """sqrt(M) exp(-j phi^2/2): the exponential relaxation of mixing_bound.

    Always >= the exact form since 1 - x <= exp(-x).
    """
    _validate_phi_density(phi, density_bound)
    if j < 0:
        raise ValueError("j must be >= 0")
    return math.sqrt(density_bound) * math.exp(-j * 0.5 * phi * phi)


def _validate_phi_density(phi, density_bound):
    if not 0.0 <= phi <= 1.0:
        raise ValueError("phi must lie in [0, 1]")
    if density_bound < 1.0:
        raise ValueError("the start-density bound M is a sup of a density w.r.t. pi, so M >= 1")


def cheeger_bound(phi, j, g_norm_sq):
    """(1 - phi^2/2)^j * ||g||^2: decay bound for <P^j g, g> with mean-zero g."""
    if not 0.0 <= phi <= 1.0:
        raise ValueError("phi must lie in [0, 1]")
    if j < 0:
        raise ValueError("j must be >= 0")
    if g_norm_sq < 0.0:
        raise ValueError("g_norm_sq must be >= 0")
    return (1.0 - 0.5 * phi * phi) ** j * g_norm_sq


def stationary_error_bound(phi, n, f_l2_norm):
    """Root-mean-square error bound 2 ||f||_2 / (phi sqrt(n)) for stationary starts."""
    if phi <= 0.0:
        raise ValueError("phi must be positive; the bound is vacuous at phi = 0")
    if phi > 1.0:
        raise ValueError("phi must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    if f_l2_norm < 0.0:
        raise ValueError("f_l2_norm must be >= 0")
    return 2.0 * f_l2_norm / (phi * math.sqrt(n))


@dataclass(frozen=True)
class BoundReport:
    """Error bound, burn-in, and cost for one (phi, M, n, n0, ||f||) setting.

    ``start_penalty`` is the term 24 sqrt(M) exp(-n0 phi^2/2) inside the
    root; it decays monotonically in n0 and is <= 24 exactly when
    n0 >= log(M)/phi^2.
    """

    phi: float
    density_bound: float
    n0: int
    n: int
    start_penalty: float
    error_bound: float
    cost_total: int

    def to_dict(self):
        return {
            "phi": self.phi,
            "density_bound": self.density_bound,
            "n0": self.n0,
            "n": self.n,
            "start_penalty": self.start_penalty,
            "error_bound": self.error_bound,
            "cost_total": self.cost_total,
        }


def error_bound(phi, n, n0, density_bound, f_sup_norm):
    """General-start root-mean-square error bound as a BoundReport.

    error = 2 sqrt(1 + 24 sqrt(M) exp(-n0 phi^2/2)) / (phi sqrt(n)) * ||f||_inf.
    """
    if phi <= 0.0 or phi > 1.0:
        raise ValueError("phi must lie in (0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    if n0 < 0:
        raise ValueError("n0 must be >= 0")
    if density_bound < 1.0:
        raise ValueError("M must be >= 1")
    if f_sup_norm < 0.0:
        raise ValueError("f_sup_norm must be >= 0")
    penalty = 24.0 * math.sqrt(density_bound) * math.exp(-n0 * 0.5 * phi * phi)
    value = 2.0 * math.sqrt(1.0 + penalty) / (phi * math.sqrt(n)) * f_sup_norm
    return BoundReport(
        phi=float(phi),
        density_bound=float(density_bound),
        n0=int(n0),
        n=int(n),
        start_penalty=penalty,
        error_bound=value,
        cost_total=int(n) + int(n0),
    )


def burn_in(density_bound, phi):
    """ceil(log(M) / phi^2): burn-in making the error <= 10 ||f||_inf / (phi sqrt(n))."""
    if density_bound < 1.0:
        raise ValueError("M must be >= 1")
    if phi <= 0.0 or phi > 1.0:
        raise ValueError("phi must lie in (0, 1]")
    return _ceil_snapped(math.log(density_bound) / (phi * phi))


def cost(density_bound, phi, f_sup_norm, eps):
    """Total steps ceil(log M / phi^2) + ceil(100 ||f||^2 / (phi^2 eps^2)) for error eps."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if density_bound < 1.0:
        raise ValueError("M must be >= 1")
    if phi <= 0.0 or phi > 1.0:
        raise ValueError("phi must lie in (0, 1]")
    if f_sup_norm < 0.0:
        raise ValueError("f_sup_norm must be >= 0")
    burn_term = _ceil_snapped(math.log(density_bound) / (phi * phi))
    sample_term = _ceil_snapped(100.0 * f_sup_norm * f_sup_norm / (phi * phi * eps * eps))
    return burn_term + sample_term


def ball_walk_conductance_lower(d, alpha):
    """Conductance lower bound of the Metropolis ball walk on the unit ball.

    0.0025 / sqrt(d+1) * min{1/sqrt(d+1), 1/alpha}, with 1/alpha read as
    +inf at alpha = 0. This is the bound BEFORE lazification; compose with
    lazification_conductance for the lazy chain actually run.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    return BALL_CONDUCTANCE_COEFF / math.sqrt(d + 1.0) * delta_choice(d, alpha)


def ball_walk_burn_in(d, alpha):
    """ceil(1280000 alpha (d+1) max{d+1, alpha^2}): headline burn-in length."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    return _ceil_snapped(BALL_BURNIN_CONSTANT * alpha * (d + 1.0) * max(d + 1.0, alpha * alpha))


def ball_walk_sample_size(d, alpha, eps, f_sup_norm=1.0):
    """ceil(64000000 (d+1) max{d+1, alpha^2} ||f||^2 / eps^2): n for error eps."""
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    return _ceil_snapped(
        BALL_COST_CONSTANT * (d + 1.0) * max(d + 1.0, alpha * alpha) * f_sup_norm * f_sup_norm / (eps * eps)
    )


@dataclass(frozen=True)
class BallWalkPlan:
    """Full plan for the lazy Metropolis ball walk at a given (d, alpha, n).

    ``headline_error_bound`` uses the headline constant
    8000 sqrt(d+1) max{sqrt(d+1), alpha} / sqrt(n) per unit sup norm;
    ``composed`` is the general-start BoundReport evaluated with the
    certified lazy conductance bound and M = exp(2 alpha) at the same
    (n, n0). The headline bound is never smaller than the composed one.
    """

    dimension: int
    alpha: float
    delta: float
    n: int
    n0: int
    phi_lower: float
    phi_lazy_lower: float
    density_bound: float
    headline_error_bound: float
    composed: BoundReport
    cost_total: int

    def to_dict(self):
        return {
            "dimension": self.dimension,
            "alpha": self.alpha,
            "delta": self.delta,
            "n": self.n,
            "n0": self.n0,
            "phi_lower": self.phi_lower,
            "phi_lazy_lower": self.phi_lazy_lower,
            "density_bound": self.density_bound,
            "headline_error_bound": self.headline_error_bound,
            "composed_error_bound": self.composed.error_bound,
            "composed_start_penalty": self.composed.start_penalty,
            "cost_total": self.cost_total,
        }


def ball_plan(d, alpha, n):
    """Plan the lazy Metropolis ball walk: delta, burn-in, and both error bounds.

    The error bounds are per unit ||f||_inf; multiply by the actual sup norm.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if alpha < 0.0:
        raise ValueError("alpha must be >= 0")
    if n < 1:
        raise ValueError("n must be >= 1")
    delta = delta_choice(d, alpha)
    n0 = ball_walk_burn_in(d, alpha)
    headline = (
        BALL_ERROR_CONSTANT * math.sqrt(d + 1.0) * max(math.sqrt(d + 1.0), alpha) / math.sqrt(n)
    )
    phi_lower = ball_walk_conductance_lower(d, alpha)
    phi_lazy = lazification_conductance(phi_lower)
    density = math.exp(2.0 * alpha)
    composed = error_bound(phi_lazy, n, n0, density, 1.0)
    return BallWalkPlan(
        dimension=int(d),
        alpha=float(alpha),
        delta=delta,
        n=int(n),
        n0=int(n0),
        phi_lower=phi_lower,
        phi_lazy_lower=phi_lazy,
        density_bound=density,
        headline_error_bound=headline,
        composed=composed,
        cost_total=int(n) + int(n0),
    )
