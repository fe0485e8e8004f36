"""Independent oracles shared by the test modules.

These deliberately avoid the package's own numerics: numpy polynomial
utilities, a tiny-step RK4 marcher, and a plain fixed-point implicit
Runge-Kutta step. Keep them independent so the cross-checks stay honest.
"""

import numpy as np


def rk4_reference(field, y0, t, n_steps=20000):
    """March y' = field(y) with classical RK4 at a tiny fixed step."""
    h = t / n_steps
    y = np.array(y0, dtype=float)
    for _ in range(n_steps):
        k1 = field(y)
        k2 = field(y + 0.5 * h * k1)
        k3 = field(y + 0.5 * h * k2)
        k4 = field(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return y


def gauss_irk_step(field, y0, dt, a, b, tol=1e-14, max_iter=500):
    """One implicit RK step solved by plain fixed-point iteration.

    Converges only when dt times the field's Lipschitz constant is small;
    callers pick dt accordingly.
    """
    y0 = np.asarray(y0, dtype=float)
    s = len(b)
    k = np.tile(field(y0), (s, 1))
    for _ in range(max_iter):
        k_new = np.array([field(y0 + dt * (a[i] @ k)) for i in range(s)])
        delta = float(np.max(np.abs(k_new - k)))
        k = k_new
        if delta <= tol:
            return y0 + dt * (b @ k)
    raise AssertionError(f"fixed-point IRK stalled at delta={delta:.3e}")


def fit_slope(dts, errs):
    """Least-squares slope of log(err) against log(dt)."""
    return float(np.polyfit(np.log(np.asarray(dts)), np.log(np.asarray(errs)), 1)[0])


def random_poly(rng, degree):
    """Random polynomial with coefficients in [-1, 1]; returns (poly, derivative)."""
    coeffs = rng.uniform(-1.0, 1.0, degree + 1)
    dcoeffs = np.polynomial.polynomial.polyder(coeffs) if degree > 0 else np.zeros(1)

    def poly(x):
        return np.polynomial.polynomial.polyval(x, coeffs)

    def dpoly(x):
        return np.polynomial.polynomial.polyval(x, dcoeffs)

    return poly, dpoly
