"""Dense linear algebra kernels for small (n <= 64) real matrices.

Matrices are plain ``numpy.ndarray`` objects. LU factorisation and the
Hessenberg/shifted-QR eigenvalue iteration are delegated to LAPACK
(``getrf``/``getrs`` and ``gehrd``/``hseqr``); this module adds the
input validation, pivot and stability checks, and deterministic output
ordering the rest of the package relies on.
"""

import warnings

import numpy as np
import scipy.linalg

from .errors import NoConvergence, NonFinite, SingularMatrix, UnstableDrift

#: Stability margin on the spectral abscissa, in the working time units.
STAB_EPS = 1e-9

#: Relative pivot threshold for :func:`lu_solve`.
PIVOT_TOL = 1e-13

MAX_EIG_DIM = 64


def as_mat(a, name="matrix"):
    """Return ``a`` as a finite 2-D float array, raising :class:`NonFinite` otherwise."""
    m = np.asarray(a, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFinite(f"{name} contains NaN or Inf")
    return m


def _square(a, name):
    m = as_mat(a, name)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    return m


def lu_solve(A, B):
    """Solve ``A X = B`` by LU factorisation with partial pivoting.

    Parameters
    ----------
    A : (n, n) array_like
    B : (n,) or (n, k) array_like

    Returns
    -------
    ndarray
        ``X`` with the same shape as ``B``.

    Raises
    ------
    SingularMatrix
        If a pivot smaller than ``1e-13 * max|A|`` appears.
    """
    A = _square(A, "A")
    b = np.asarray(B, dtype=float)
    vector = b.ndim == 1
    b = as_mat(b, "B")
    if b.shape[0] != A.shape[0]:
        raise ValueError(f"B has {b.shape[0]} rows, A is {A.shape[0]}x{A.shape[0]}")

    scale = np.max(np.abs(A))
    if scale == 0.0:
        raise SingularMatrix("A is identically zero")
    with warnings.catch_warnings():
        # exact zero pivots are reported by our own check below
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=False)
    pivots = np.abs(np.diag(lu))
    k = int(np.argmin(pivots))
    if pivots[k] < PIVOT_TOL * scale:
        raise SingularMatrix(
            f"pivot {k} has magnitude {pivots[k]:.3e} < {PIVOT_TOL:g} * max|A| ({scale:.3e})"
        )
    x = scipy.linalg.lu_solve((lu, piv), b, check_finite=False)
    return x[:, 0] if vector else x


def eigenvalues(A):
    """All eigenvalues of a general real square matrix.

    Sorted by descending real part, ties broken by descending imaginary
    part, so that repeated calls give identical arrays.
    """
    A = _square(A, "A")
    n = A.shape[0]
    if n > MAX_EIG_DIM:
        raise ValueError(f"eigenvalues supports n <= {MAX_EIG_DIM}, got {n}")
    try:
        w = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"QR iteration did not converge: {exc}") from exc
    w = w.astype(complex)
    order = np.lexsort((-w.imag, -w.real))
    return w[order]


def spectral_abscissa(A):
    """Largest real part over the spectrum of ``A``."""
    return float(eigenvalues(A)[0].real)


def is_stable(A, eps=STAB_EPS):
    return spectral_abscissa(A) < -eps


def solve_lyapunov(K, D, require_stable=True):
    """Solve ``K V + V K^T = -D`` for symmetric ``V``.

    The equation is vectorised as ``(K (x) I + I (x) K) vec(V) = -vec(D)``
    (row-major ``vec``) and solved with :func:`lu_solve`; the result is
    symmetrised exactly.

    Parameters
    ----------
    K : (m, m) array_like
        Drift matrix.
    D : (m, m) array_like
        Symmetric positive semidefinite diffusion matrix.
    require_stable : bool
        When true (the default) an :class:`UnstableDrift` is raised unless
        the spectral abscissa of ``K`` is below ``-STAB_EPS``. Passing
        false solves the algebraic equation regardless; the result is then
        generally *not* a covariance matrix.
    """
    K = _square(K, "K")
    D = _square(D, "D")
    m = K.shape[0]
    if D.shape != K.shape:
        raise ValueError(f"D has shape {D.shape}, K has shape {K.shape}")
    dnorm = np.linalg.norm(D)
    if np.max(np.abs(D - D.T)) > 1e-12 * max(dnorm, 1.0):
        raise ValueError("D must be symmetric")
    if dnorm > 0 and np.linalg.eigvalsh(D)[0] < -1e-12 * dnorm:
        raise ValueError("D must be positive semidefinite")

    if require_stable:
        sa = spectral_abscissa(K)
        if not sa < -STAB_EPS:
            raise UnstableDrift(f"spectral abscissa {sa:.6g} >= -{STAB_EPS:g}")

    eye = np.eye(m)
    L = np.kron(K, eye) + np.kron(eye, K)
    v = lu_solve(L, -D.reshape(-1)).reshape(m, m)
    return 0.5 * (v + v.T)


def lyapunov_residual(K, V, D):
    """Relative residual ``||K V + V K^T + D||_F / ||D||_F``."""
    K, V, D = (np.asarray(x, dtype=float) for x in (K, V, D))
    r = np.linalg.norm(K @ V + V @ K.T + D)
    return r / max(np.linalg.norm(D), np.finfo(float).tiny)


def omega(n):
    """Symplectic form for ``n`` modes, ordering ``(q1, p1, q2, p2, ...)``."""
    return np.kron(np.eye(n), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def symplectic_eigenvalues(V):
    """Symplectic eigenvalues of a ``2n x 2n`` symmetric matrix, ascending.

    These are the moduli of the eigenvalues of ``i Omega V``, which come in
    ``+/-`` pairs; each is reported once. With vacuum variance 1/2 a
    physical covariance has all of them >= 1/2.
    """
    V = np.asarray(V, dtype=float)
    if not np.all(np.isfinite(V)):
        raise NonFinite("V contains NaN or Inf")
    V = _square(V, "V")
    if V.shape[0] % 2:
        raise ValueError(f"V must have even dimension, got {V.shape[0]}")
    n = V.shape[0] // 2
    w = np.linalg.eigvals(1j * omega(n) @ V)
    mods = np.sort(np.abs(w))
    return 0.5 * (mods[0::2] + mods[1::2])
