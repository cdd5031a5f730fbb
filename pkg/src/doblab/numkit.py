"""Fixed-size 2x2 linear algebra used by the discretization and observer tuning.

Everything here works on plain numpy arrays: a Mat2 is a float (2, 2) array,
a Vec2 is a float (2,) array. Only real matrices are supported; eigenvalues
may come back complex.
"""

import numpy as np

# Absolute tolerance for the matrix-function series cores. Single knob so the
# property tests and the implementations agree on what "converged" means.
MATFUNC_ATOL = 1e-12

# Number of Taylor terms in the scaled series cores. With the norm scaled
# below 0.5 the 20th term is ~1e-26, far under MATFUNC_ATOL.
_SERIES_TERMS = 20


def as_mat2(m) -> np.ndarray:
    """Coerce to a float (2, 2) array and validate finiteness."""
    a = np.asarray(m, dtype=float)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    return a


def as_vec2(v) -> np.ndarray:
    """Coerce to a float (2,) array and validate finiteness."""
    a = np.asarray(v, dtype=float).reshape(-1)
    if a.shape != (2,):
        raise ValueError(f"expected a 2-vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("vector entries must be finite")
    return a


def _expm2_taylor(m: np.ndarray) -> np.ndarray:
    """Scaling-and-squaring with a fixed-order Taylor core."""
    norm = np.max(np.sum(np.abs(m), axis=1))
    s = 0
    while norm > 0.5:
        norm /= 2.0
        s += 1
    a = m / (2.0**s)
    out = np.eye(2)
    term = np.eye(2)
    for i in range(1, _SERIES_TERMS + 1):
        term = term @ a / i
        out = out + term
    for _ in range(s):
        out = out @ out
    return out


def expm2(m) -> np.ndarray:
    """Matrix exponential of a real 2x2 matrix.

    Upper-triangular input (the servo plant's structure) uses the exact
    closed form; anything else goes through scaling-and-squaring.
    """
    a = as_mat2(m)
    if a[1, 0] == 0.0:
        p, q, s = a[0, 0], a[0, 1], a[1, 1]
        ep, es = np.exp(p), np.exp(s)
        if p == s:
            off = q * ep
        else:
            off = q * (ep - es) / (p - s)
        return np.array([[ep, off], [0.0, es]])
    return _expm2_taylor(a)


def phi_integral(m, ts: float) -> np.ndarray:
    """Integral of expm2(m * tau) for tau in [0, ts].

    Never inverts m, so singular matrices (the double-integrator plant)
    are handled exactly. Uses the scaled series with the doubling identity
    Phi(2t) = (I + e^{mt}) Phi(t).
    """
    a = as_mat2(m)
    if ts <= 0:
        raise ValueError(f"integration horizon must be positive, got {ts}")
    norm = np.max(np.sum(np.abs(a), axis=1)) * ts
    s = 0
    while norm > 0.5:
        norm /= 2.0
        s += 1
    h = ts / (2.0**s)
    # Phi(h) = sum_i a^i h^{i+1} / (i+1)!
    phi = np.eye(2) * h
    term = np.eye(2) * h
    for i in range(1, _SERIES_TERMS + 1):
        term = term @ a * (h / (i + 1))
        phi = phi + term
    e = expm2(a * h)
    for _ in range(s):
        phi = (np.eye(2) + e) @ phi
        e = e @ e
    return phi


def eig2(m) -> tuple[complex, complex]:
    """Eigenvalues of a real 2x2 matrix via the characteristic quadratic.

    Returns a pair that is closed under conjugation (both real, or a
    conjugate pair), sorted by (real, imag) for determinism.
    """
    a = as_mat2(m)
    tr = a[0, 0] + a[1, 1]
    det = a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0]
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        r = np.sqrt(disc)
        lam1 = (tr - r) / 2.0
        lam2 = (tr + r) / 2.0
        pair = (complex(lam1), complex(lam2))
    else:
        im = np.sqrt(-disc) / 2.0
        pair = (complex(tr / 2.0, -im), complex(tr / 2.0, im))
    return tuple(sorted(pair, key=lambda z: (z.real, z.imag)))


def spectral_radius(m) -> float:
    """Largest eigenvalue modulus of a real 2x2 matrix."""
    lam1, lam2 = eig2(m)
    return max(abs(lam1), abs(lam2))
