"""Compiled inner loop for the lazy Metropolis ball walk.

The kernel below consumes a ``numpy.random.Generator`` in exactly the same
order as the pure-Python step functions in ``walk`` (numba's Generator
support is stream-compatible with NumPy), so for the built-in density and
integrand families both paths produce bit-identical trajectories. Keep the
arithmetic here in lockstep with ``walk._propose`` and the built-in
``log_density`` implementations: same operations, same association order.
"""

import numpy as np
from numba import njit

from . import densities

DENSITY_CODES = {
    densities.DENSITY_UNIFORM: 0,
    densities.DENSITY_EXPLIN: 1,
    densities.DENSITY_GAUSS: 2,
}

INTEGRAND_CODES = {
    densities.INTEGRAND_ONE: 0,
    densities.INTEGRAND_COORD: 1,
    densities.INTEGRAND_COORD2: 2,
    densities.INTEGRAND_HALFSPACE: 3,
}


def supports(rho, f):
    """True when both the density and the integrand have a compiled form."""
    return rho.kind in DENSITY_CODES and f.kind in INTEGRAND_CODES


@njit(cache=True, nogil=True)
def _log_density(code, params, x):
    if code == 0:
        return 0.0
    if code == 1:
        s = 0.0
        for k in range(x.shape[0]):
            s += params[k] * x[k]
        return s
    s = 0.0
    for k in range(x.shape[0]):
        s += x[k] * x[k]
    return -params[0] * s


@njit(cache=True, nogil=True)
def _integrand(code, idx, threshold, x):
    if code == 0:
        return 1.0
    if code == 1:
        return x[idx]
    if code == 2:
        return x[idx] * x[idx]
    return 1.0 if x[idx] <= threshold else 0.0


@njit(cache=True, nogil=True)
def simulate_average(rng, x0, delta, n0, n, density_code, density_params, f_code, f_idx, f_threshold):
    """Run n0 + n lazy Metropolis steps from x0, averaging f over the last n.

    Returns (estimate, rho_evaluations). The initial point is assumed to be
    drawn (and its density evaluated) by the caller's contract: this kernel
    counts the initial evaluation itself so both paths report identically.
    """
    d = x0.shape[0]
    x = x0.copy()
    z = np.empty(d)
    y = np.empty(d)
    log_rho_x = _log_density(density_code, density_params, x)
    rho_evals = 1
    total = 0.0
    for step in range(1, n0 + n + 1):
        coin = rng.random()
        if coin >= 0.5:
            norm2 = 0.0
            for k in range(d):
                z[k] = rng.standard_normal()
                norm2 += z[k] * z[k]
            while norm2 == 0.0:
                norm2 = 0.0
                for k in range(d):
                    z[k] = rng.standard_normal()
                    norm2 += z[k] * z[k]
            u = rng.random()
            c = delta * (u ** (1.0 / d)) / np.sqrt(norm2)
            ynorm2 = 0.0
            for k in range(d):
                y[k] = x[k] + c * z[k]
                ynorm2 += y[k] * y[k]
            if ynorm2 <= 1.0:
                log_rho_y = _log_density(density_code, density_params, y)
                rho_evals += 1
                a = rng.random()
                if a == 0.0 or np.log(a) <= log_rho_y - log_rho_x:
                    for k in range(d):
                        x[k] = y[k]
                    log_rho_x = log_rho_y
        if step > n0:
            total += _integrand(f_code, f_idx, f_threshold, x)
    return total / n, rho_evals


def run_compiled(rng, x0, delta, n0, n, rho, f):
    """Dispatch helper: encode the built-in density/integrand and run the kernel."""
    density_code = DENSITY_CODES[rho.kind]
    density_params = np.asarray(rho.params, dtype=float)
    f_code = INTEGRAND_CODES[f.kind]
    if f.kind == densities.INTEGRAND_ONE:
        f_idx, f_threshold = 0, 0.0
    elif f.kind == densities.INTEGRAND_HALFSPACE:
        f_idx, f_threshold = int(f.params[0]), float(f.params[1])
    else:
        f_idx, f_threshold = int(f.params[0]), 0.0
    return simulate_average(
        rng, x0, float(delta), int(n0), int(n), density_code, density_params, f_code, f_idx, f_threshold
    )
