"""Finite-state Markov kernel algebra.

Row-stochastic transition matrices together with probability vectors and
state functions form the exact-oracle layer of the package: stationarity,
reversibility (detailed balance), lazification, the Markov operator, and
n-step powers are all computed with plain linear algebra so that every
inequality elsewhere in the package can be checked against exact numbers.

Conventions: matrices are row-stochastic (row = source state), all weighted
norms and inner products use the stationary distribution, and every value
object is immutable after construction.
"""

import json
import math

import numpy as np

# Validation tolerance for stochasticity / probability mass.
STOCHASTIC_TOL = 1e-12
# Tolerance for derived identities (double-precision accumulation, <= 8 states).
IDENTITY_TOL = 1e-10


def _frozen_array(values, dtype=float):
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class DiscreteKernel:
    """A row-stochastic transition matrix on a finite state space.

    Entry [i, j] is the probability of moving from state i to state j in
    one step. The matrix is validated on construction (entries in [0, 1],
    rows summing to 1 within ``STOCHASTIC_TOL``) and stored read-only.
    """

    __slots__ = ("matrix",)

    def __init__(self, matrix):
        arr = _frozen_array(matrix)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise ValueError("state space must contain at least one state")
        if not np.all(np.isfinite(arr)):
            raise ValueError("transition matrix contains non-finite entries")
        if arr.min() < -STOCHASTIC_TOL or arr.max() > 1.0 + STOCHASTIC_TOL:
            raise ValueError("transition probabilities must lie in [0, 1]")
        row_err = np.abs(arr.sum(axis=1) - 1.0).max()
        if row_err > STOCHASTIC_TOL:
            raise ValueError(f"rows must sum to 1 (max deviation {row_err:.3e})")
        object.__setattr__(self, "matrix", arr)

    def __setattr__(self, name, value):
        raise AttributeError("DiscreteKernel is immutable")

    @property
    def size(self):
        return self.matrix.shape[0]

    def __eq__(self, other):
        return isinstance(other, DiscreteKernel) and np.array_equal(self.matrix, other.matrix)

    def __repr__(self):
        return f"DiscreteKernel(size={self.size})"


class ProbabilityVector:
    """A probability distribution over the finite state space."""

    __slots__ = ("weights",)

    def __init__(self, weights):
        arr = _frozen_array(weights)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError("probability vector must be one-dimensional and nonempty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("probability vector contains non-finite entries")
        if arr.min() < 0.0:
            raise ValueError("probabilities must be nonnegative")
        if abs(arr.sum() - 1.0) > STOCHASTIC_TOL:
            raise ValueError(f"probabilities must sum to 1, got {arr.sum()!r}")
        object.__setattr__(self, "weights", arr)

    def __setattr__(self, name, value):
        raise AttributeError("ProbabilityVector is immutable")

    @property
    def size(self):
        return self.weights.shape[0]

    def __repr__(self):
        return f"ProbabilityVector({np.array2string(self.weights, precision=6)})"


class StateFunction:
    """A real-valued function on the finite state space (one value per state)."""

    __slots__ = ("values",)

    def __init__(self, values):
        arr = _frozen_array(values)
        if arr.ndim != 1 or arr.shape[0] < 1:
            raise ValueError("state function must be one-dimensional and nonempty")
        if not np.all(np.isfinite(arr)):
            raise ValueError("state function contains non-finite values")
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("StateFunction is immutable")

    @property
    def size(self):
        return self.values.shape[0]

    def __repr__(self):
        return f"StateFunction({np.array2string(self.values, precision=6)})"


def _check_dims(kernel, other, what):
    if kernel.size != other.size:
        raise ValueError(f"dimension mismatch: kernel has {kernel.size} states, {what} has {other.size}")


def n_step(kernel, n):
    """Return the n-step transition kernel K^n (matrix power).

    n = 0 is rejected; use the identity kernel explicitly if that is meant.
    """
    if n < 1:
        raise ValueError("n must be >= 1; build an identity kernel explicitly for n = 0")
    return DiscreteKernel(np.linalg.matrix_power(kernel.matrix, int(n)))


def check_stationarity(kernel, pi, tol):
    """True iff pi K = pi componentwise within tol (pi is invariant for K)."""
    _check_dims(kernel, pi, "pi")
    residual = np.abs(pi.weights @ kernel.matrix - pi.weights).max()
    return bool(residual <= tol)


def stationarity_residual(kernel, pi):
    """max_j |sum_i pi_i K[i, j] - pi_j|, the invariance defect of pi."""
    _check_dims(kernel, pi, "pi")
    return float(np.abs(pi.weights @ kernel.matrix - pi.weights).max())


def check_reversibility(kernel, pi, tol):
    """True iff detailed balance pi_i K[i, j] = pi_j K[j, i] holds within tol."""
    _check_dims(kernel, pi, "pi")
    flows = pi.weights[:, None] * kernel.matrix
    return bool(np.abs(flows - flows.T).max() <= tol)


def reversibility_residual(kernel, pi):
    """max_{i,j} |pi_i K[i, j] - pi_j K[j, i]|, the detailed-balance defect."""
    _check_dims(kernel, pi, "pi")
    flows = pi.weights[:, None] * kernel.matrix
    return float(np.abs(flows - flows.T).max())


def lazify(kernel):
    """Return the lazy kernel (K + I) / 2, whose diagonal is >= 1/2.

    Lazification preserves stationarity and reversibility of the input.
    """
    lazy = 0.5 * kernel.matrix + 0.5 * np.eye(kernel.size)
    return DiscreteKernel(lazy)


def apply_operator(kernel, f):
    """Apply the Markov operator: (Pf)(i) = sum_j K[i, j] f(j)."""
    _check_dims(kernel, f, "f")
    return StateFunction(kernel.matrix @ f.values)


def check_operator_psd(kernel, pi, tol):
    """True iff the Markov operator of a reversible kernel is positive semidefinite.

    The operator is symmetrized as D^{1/2} K D^{-1/2} with D = diag(pi); for a
    reversible kernel this matrix is symmetric, so its spectrum is real and the
    check reduces to the smallest eigenvalue being >= -tol. Lazy reversible
    kernels always pass. Non-reversible input is rejected because the
    symmetrized spectrum is no longer the operator's spectrum.
    """
    _check_dims(kernel, pi, "pi")
    if pi.weights.min() <= 0.0:
        raise ValueError("pi must be strictly positive for the symmetrized eigenvalue check")
    if not check_reversibility(kernel, pi, IDENTITY_TOL):
        raise ValueError("kernel is not reversible w.r.t. pi; the eigenvalue check does not apply")
    root = np.sqrt(pi.weights)
    sym = (root[:, None] * kernel.matrix) / root[None, :]
    sym = 0.5 * (sym + sym.T)
    smallest = np.linalg.eigvalsh(sym)[0]
    return bool(smallest >= -tol)


def smallest_operator_eigenvalue(kernel, pi):
    """Smallest eigenvalue of the symmetrized Markov operator (reversible input)."""
    _check_dims(kernel, pi, "pi")
    if pi.weights.min() <= 0.0:
        raise ValueError("pi must be strictly positive")
    root = np.sqrt(pi.weights)
    sym = (root[:, None] * kernel.matrix) / root[None, :]
    sym = 0.5 * (sym + sym.T)
    return float(np.linalg.eigvalsh(sym)[0])


def mean_under(f, pi):
    """The pi-average of f: sum_i pi_i f(i)."""
    _check_dims(pi, f, "f")
    return float(pi.weights @ f.values)


def centered(f, pi):
    """f minus its pi-average (a mean-zero state function)."""
    return StateFunction(f.values - mean_under(f, pi))


def inner_under(f, g, pi):
    """The pi-weighted inner product sum_i pi_i f(i) g(i)."""
    if f.size != g.size or f.size != pi.size:
        raise ValueError("dimension mismatch between functions and pi")
    return float(np.sum(pi.weights * f.values * g.values))


def norm_under(f, pi, p=2):
    """The pi-weighted L_p norm of f for p in {1, 2, inf}."""
    _check_dims(pi, f, "f")
    if p == 1:
        return float(np.sum(pi.weights * np.abs(f.values)))
    if p == 2:
        return math.sqrt(float(np.sum(pi.weights * f.values**2)))
    if p in (np.inf, math.inf, "inf"):
        return float(np.abs(f.values).max())
    raise ValueError("p must be 1, 2, or inf")


def random_reversible_pair(rng, size, low=0.05, high=1.0):
    """Draw a random reversible pair (K, pi) with strictly positive pi.

    A symmetric positive flow matrix F is sampled; K normalizes its rows and
    pi is the row-mass of F, which makes pi stationary and detailed balance
    exact by construction. Entries of F are bounded away from zero so that
    no state has vanishing mass and the conductance is positive.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    raw = rng.uniform(low, high, size=(size, size))
    flows = 0.5 * (raw + raw.T)
    row_mass = flows.sum(axis=1)
    kernel = DiscreteKernel(flows / row_mass[:, None])
    pi = ProbabilityVector(row_mass / row_mass.sum())
    return kernel, pi


def random_state_function(rng, size, scale=1.0):
    """A state function with i.i.d. uniform values in [-scale, scale]."""
    return StateFunction(rng.uniform(-scale, scale, size=size))


def random_start_distribution(rng, pi, low=0.2, high=5.0):
    """A start distribution nu with density nu/pi bounded by high/low-ish factors.

    nu is proportional to pi times a random positive weight per state, which
    keeps the density ratio max_i nu_i/pi_i moderate for burn-in experiments.
    """
    weights = pi.weights * rng.uniform(low, high, size=pi.size)
    return ProbabilityVector(weights / weights.sum())


def density_bound(nu, pi):
    """max_i nu_i / pi_i, the sup of the start density w.r.t. pi."""
    if nu.size != pi.size:
        raise ValueError("dimension mismatch between nu and pi")
    if pi.weights.min() <= 0.0:
        raise ValueError("pi must be strictly positive")
    return float((nu.weights / pi.weights).max())


def chain_to_json(kernel, pi):
    """Serialize a (kernel, pi) pair to the {"matrix": ..., "pi": ...} schema."""
    return json.dumps({"matrix": kernel.matrix.tolist(), "pi": pi.weights.tolist()})


def chain_from_json(text):
    """Load a (kernel, pi) pair from the {"matrix": ..., "pi": ...} schema."""
    doc = json.loads(text)
    return DiscreteKernel(doc["matrix"]), ProbabilityVector(doc["pi"])


def save_chain(path, kernel, pi):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(chain_to_json(kernel, pi))
        handle.write("\n")


def load_chain(path):
    with open(path, "r", encoding="utf-8") as handle:
        return chain_from_json(handle.read())
