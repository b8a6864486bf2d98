"""Stationary covariance, Gaussian steerability and the homodyne readout map.

Conventions: quadratures with ``[q, p] = i``, vacuum variance 1/2. The
mechanical block of the 8x8 covariance is

    Vm = [[A, C], [C^T, B]]

with ``A`` the first mirror, ``B`` the second and ``C`` their correlations.
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from . import matkit
from .errors import NonPositiveNoise, SingularBlock, SteeringMismatch, UnphysicalCovariance
from .model import drift_diffusion

#: Steerabilities at or below this value (nats) count as zero.
STEER_EPS = 1e-9

PHYSICAL_TOL = 1e-9
FORMULA_TOL = 1e-10

# per-mode pi/2 rotation, (q, p) -> (-p, q): multiplication of dm by i
_ROT = np.array([[0.0, -1.0], [1.0, 0.0]])
ROTATION = np.kron(np.eye(2), _ROT)

SWAP = np.block([[np.zeros((2, 2)), np.eye(2)], [np.eye(2), np.zeros((2, 2))]])


class Classification(str, Enum):
    NO_WAY = "NoWay"
    ONE_WAY_1TO2 = "OneWay_1to2"
    ONE_WAY_2TO1 = "OneWay_2to1"
    TWO_WAY = "TwoWay"
    UNSTABLE = "Unstable"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CovarianceState:
    full: Optional[np.ndarray]
    mech: Optional[np.ndarray]
    stable: bool
    spectral_abscissa: float

    @property
    def A(self):
        return None if self.mech is None else self.mech[:2, :2]

    @property
    def B(self):
        return None if self.mech is None else self.mech[2:, 2:]

    @property
    def C(self):
        return None if self.mech is None else self.mech[:2, 2:]


@dataclass(frozen=True)
class SteeringResult:
    """Outcome of one parameter point.

    ``g_12``/``g_21``/``energy_imbalance`` are None when no stationary
    state exists (unstable drift, gated evaluation).
    """

    g_12: Optional[float]
    g_21: Optional[float]
    energy_imbalance: Optional[float]
    classification: Classification
    stable: bool
    spectral_abscissa: float
    covariance: Optional[CovarianceState] = None


def steady_covariance(dd, gate=True):
    """Stationary covariance of the linearised dynamics.

    With ``gate=False`` the Lyapunov equation is solved even when the
    drift is unstable. Such a matrix describes no physical state; it is
    only useful to compare against calculations that skipped the
    stability check. ``stable`` is reported truthfully either way.
    """
    sa = matkit.spectral_abscissa(dd.K)
    stable = sa < -matkit.STAB_EPS
    if not stable and gate:
        return CovarianceState(full=None, mech=None, stable=False, spectral_abscissa=sa)
    V = matkit.solve_lyapunov(dd.K, dd.D, require_stable=False)
    return CovarianceState(full=V, mech=V[:4, :4].copy(), stable=stable, spectral_abscissa=sa)


def _check_cov4(Vm):
    Vm = matkit.as_mat(Vm, "Vm")
    if Vm.shape != (4, 4):
        raise ValueError(f"Vm must be 4x4, got {Vm.shape}")
    if np.max(np.abs(Vm - Vm.T)) > 1e-12 * max(1.0, np.max(np.abs(Vm))):
        raise ValueError("Vm must be symmetric")
    return 0.5 * (Vm + Vm.T)


def is_physical(Vm, tol=PHYSICAL_TOL):
    """Positive definite with every symplectic eigenvalue >= 1/2 - tol."""
    Vm = np.asarray(Vm, dtype=float)
    if np.linalg.eigvalsh(Vm)[0] <= 0:
        return False
    return bool(matkit.symplectic_eigenvalues(Vm)[0] >= 0.5 - tol)


def swap_modes(Vm):
    return SWAP @ np.asarray(Vm, dtype=float) @ SWAP


def steering_forms(Vm, steerer=1, check_physical=True):
    """Steerability from ``steerer`` by two routes: ``(schur_form, determinant_form)``.

    The first uses the symplectic eigenvalue of the Schur complement of the
    steering block, the second ``max[0, 1/2 ln(det A / (4 det Vm))]``.
    """
    Vm = _check_cov4(Vm)
    if steerer == 2:
        Vm = swap_modes(Vm)
    elif steerer != 1:
        raise ValueError(f"steerer must be 1 or 2, got {steerer!r}")

    if check_physical and not is_physical(Vm):
        raise UnphysicalCovariance("covariance is not positive definite or violates nu >= 1/2")

    A, B, C = Vm[:2, :2], Vm[2:, 2:], Vm[:2, 2:]
    det_a = np.linalg.det(A)
    if det_a < 1e-300:
        raise SingularBlock(f"det of steering block is {det_a:.3e}")
    det_v = np.linalg.det(Vm)

    schur = B - C.T @ np.linalg.solve(A, C)
    det_schur = np.linalg.det(schur)
    if det_schur <= 0 or det_v <= 0:
        raise UnphysicalCovariance(
            f"non-positive determinant (det Vm = {det_v:.3e}, det Schur = {det_schur:.3e})"
        )
    # one steered mode: its symplectic eigenvalue is sqrt(det) in units of the vacuum 1/2
    nu_bar = 2.0 * math.sqrt(det_schur)
    general = -math.log(nu_bar) if nu_bar < 1.0 else 0.0
    closed = max(0.0, 0.5 * math.log(det_a / (4.0 * det_v)))
    return general, closed


def gaussian_steering(Vm, steerer=1, check_physical=True):
    """Gaussian steerability (nats) of a two-mode state, from mode ``steerer`` to the other.

    Both routes of :func:`steering_forms` are evaluated;
    :class:`SteeringMismatch` is raised if they differ by more than 1e-10.

    Parameters
    ----------
    Vm : (4, 4) array_like
    steerer : {1, 2}
        Mode performing the measurements.
    check_physical : bool
        Reject covariances violating the uncertainty principle. Disable
        only for diagnostic evaluation of non-physical matrices.
    """
    general, closed = steering_forms(Vm, steerer, check_physical)
    if abs(general - closed) > FORMULA_TOL * max(1.0, abs(closed)):
        raise SteeringMismatch(f"Schur form {general!r} vs determinant form {closed!r}")
    return closed


def steerabilities(Vm, check_physical=True):
    """``(g_12, g_21)`` for a two-mode covariance."""
    return (
        gaussian_steering(Vm, 1, check_physical=check_physical),
        gaussian_steering(Vm, 2, check_physical=check_physical),
    )


def energy_imbalance(Vm):
    """Mechanical energy difference ``U1 - U2`` in units of hbar*omega_m."""
    Vm = np.asarray(Vm, dtype=float)
    return 0.5 * (Vm[0, 0] + Vm[1, 1]) - 0.5 * (Vm[2, 2] + Vm[3, 3])


def classify(g_12, g_21, stable, eps=STEER_EPS):
    if not stable:
        return Classification.UNSTABLE
    s12 = g_12 > eps
    s21 = g_21 > eps
    if s12 and s21:
        return Classification.TWO_WAY
    if s12:
        return Classification.ONE_WAY_1TO2
    if s21:
        return Classification.ONE_WAY_2TO1
    return Classification.NO_WAY


def pt_min_symplectic(Vm):
    """Smallest symplectic eigenvalue of the partially transposed covariance.

    Below 1/2 the two-mode state is entangled.
    """
    Vm = np.asarray(Vm, dtype=float)
    A, B, C = Vm[:2, :2], Vm[2:, 2:], Vm[:2, 2:]
    tilde = np.linalg.det(A) + np.linalg.det(B) - 2.0 * np.linalg.det(C)
    det_v = np.linalg.det(Vm)
    disc = max(tilde * tilde - 4.0 * det_v, 0.0)
    return math.sqrt(max(0.5 * (tilde - math.sqrt(disc)), 0.0))


def evaluate(params, gate=True):
    """Full pipeline for one normalized parameter point.

    ``gate=False`` evaluates the algebraic Lyapunov solution even for
    unstable drift and classifies it as if it were a state; ``stable`` and
    ``spectral_abscissa`` still report the truth. Physicality checks are
    relaxed in that mode.
    """
    dd = drift_diffusion(params)
    cov = steady_covariance(dd, gate=gate)
    if cov.mech is None:
        return SteeringResult(
            g_12=None, g_21=None, energy_imbalance=None,
            classification=Classification.UNSTABLE,
            stable=False, spectral_abscissa=cov.spectral_abscissa,
        )
    g12, g21 = steerabilities(cov.mech, check_physical=cov.stable)
    return SteeringResult(
        g_12=g12,
        g_21=g21,
        energy_imbalance=energy_imbalance(cov.mech),
        classification=classify(g12, g21, cov.stable or not gate),
        stable=cov.stable,
        spectral_abscissa=cov.spectral_abscissa,
        covariance=cov,
    )


def _gain(eta1, eta2):
    for name, eta in (("eta1", eta1), ("eta2", eta2)):
        if not eta > 0:
            raise ValueError(f"{name} must be > 0, got {eta!r}")
    return np.diag(np.sqrt([eta1, eta1, eta2, eta2]))


def readout_efficiency(g_c, kappa_c):
    """Transfer gain ``G_c^2 / (2 kappa_c)`` of an auxiliary readout cavity."""
    return g_c**2 / (2.0 * kappa_c)


def simulate_readout(Vm, eta1, eta2):
    """Covariance of the two homodyned output fields for mechanical covariance ``Vm``.

    Each output is ``i sqrt(eta_j) dm_j + c_in`` with ``c_in`` in vacuum, as
    a static map in the frame rotating at the mechanical frequency.
    """
    S = _gain(eta1, eta2)
    M = S @ ROTATION
    return M @ np.asarray(Vm, dtype=float) @ M.T + 0.5 * np.eye(4)


def reconstruct_mechanical(V_out, eta1, eta2):
    """Invert :func:`simulate_readout`."""
    S = _gain(eta1, eta2)
    W = np.asarray(V_out, dtype=float) - 0.5 * np.eye(4)
    W = 0.5 * (W + W.T)
    low = np.linalg.eigvalsh(W)[0]
    if low < -1e-9:
        raise NonPositiveNoise(f"output covariance minus vacuum has eigenvalue {low:.3e}")
    s_inv = np.diag(1.0 / np.diag(S))
    return ROTATION.T @ s_inv @ W @ s_inv @ ROTATION
