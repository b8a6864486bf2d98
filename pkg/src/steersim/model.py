"""Physical parametrisation, classical steady state, and the linearised
drift/diffusion matrices of two fiber-coupled optomechanical cavities.

Fluctuation basis (both matrices): ``(dq1, dp1, dq2, dp2, dx1, dy1, dx2, dy2)``
with mechanics first, optical quadratures last. After normalisation all
rates are in units of the common mechanical frequency and hbar = 1.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.constants import hbar as HBAR
from scipy.constants import k as K_B

from .errors import MismatchedMechanicalFrequencies, NoConvergence

MIN_QUALITY_FACTOR = 100.0

RELAXATION = 0.5
FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAX_ITER = 10_000


@dataclass(frozen=True)
class CavityParams:
    """One cavity, its drive laser and its movable mirror (SI units, rad/s)."""

    length: float
    kappa: float
    omega_c: float
    omega_l: float
    power: float
    mass: float
    omega_m: float
    gamma: float
    temperature: float

    def __post_init__(self):
        for name in ("length", "kappa", "omega_c", "omega_l", "mass", "omega_m", "gamma"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        for name in ("power", "temperature"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        if self.quality_factor < MIN_QUALITY_FACTOR:
            warnings.warn(
                f"mechanical Q = {self.quality_factor:.3g} < {MIN_QUALITY_FACTOR:g}; "
                "the Brownian noise model assumes a high-Q oscillator",
                stacklevel=3,
            )

    @property
    def quality_factor(self):
        return self.omega_m / self.gamma

    @property
    def bare_detuning(self):
        """Laser detuning ``omega_c - omega_L`` before the radiation-pressure shift."""
        return self.omega_c - self.omega_l

    @property
    def single_photon_coupling(self):
        return self.omega_c / self.length * math.sqrt(HBAR / (self.mass * self.omega_m))

    @property
    def drive_amplitude(self):
        return math.sqrt(2.0 * self.kappa * self.power / (HBAR * self.omega_l))


@dataclass(frozen=True)
class PhysicalParams:
    cavity1: CavityParams
    cavity2: CavityParams
    zeta: float

    def __post_init__(self):
        if not (math.isfinite(self.zeta) and self.zeta >= 0):
            raise ValueError(f"zeta must be finite and >= 0, got {self.zeta!r}")

    def cavity(self, j):
        if j == 1:
            return self.cavity1
        if j == 2:
            return self.cavity2
        raise ValueError(f"cavity index must be 1 or 2, got {j!r}")


@dataclass(frozen=True)
class NormalizedParams:
    """Dimensionless parameters; every rate is divided by the mechanical frequency.

    ``nth1``/``nth2`` are the bath occupations. Both mechanical frequencies
    are exactly 1 in these units.
    """

    delta1: float
    delta2: float
    g1: float
    g2: float
    kappa1: float
    kappa2: float
    gamma1: float
    gamma2: float
    zeta: float
    nth1: float
    nth2: float

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        for name in ("g1", "g2", "kappa1", "kappa2", "gamma1", "gamma2", "nth1", "nth2"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)!r}")

    @classmethod
    def symmetric(cls, delta, g1, g2, kappa, gamma, zeta, nth):
        """Identical cavities except for the effective couplings."""
        return cls(
            delta1=delta, delta2=delta, g1=g1, g2=g2,
            kappa1=kappa, kappa2=kappa, gamma1=gamma, gamma2=gamma,
            zeta=zeta, nth1=nth, nth2=nth,
        )

    def replace(self, **changes):
        return replace(self, **changes)

    def swapped(self):
        """The same system with the labels of the two cavities exchanged."""
        return NormalizedParams(
            delta1=self.delta2, delta2=self.delta1, g1=self.g2, g2=self.g1,
            kappa1=self.kappa2, kappa2=self.kappa1, gamma1=self.gamma2, gamma2=self.gamma1,
            zeta=self.zeta, nth1=self.nth2, nth2=self.nth1,
        )


@dataclass(frozen=True)
class SteadyState:
    """Classical fixed point of the driven system.

    ``alpha`` is the intracavity mean field, ``q`` the mean mirror
    displacement (dimensionless quadrature), ``delta`` the effective
    detuning in rad/s. The mean momenta vanish identically.
    """

    alpha: tuple
    q: tuple
    delta: tuple
    drive: tuple
    g0: tuple
    iterations: int
    step: float
    p: tuple = field(default=(0.0, 0.0))


@dataclass(frozen=True)
class DriftDiffusion:
    K: np.ndarray
    D: np.ndarray


def thermal_occupation(omega_m, temperature):
    """Bose-Einstein occupation of a mode of angular frequency ``omega_m`` at ``temperature``."""
    if not omega_m > 0:
        raise ValueError(f"omega_m must be > 0, got {omega_m!r}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        return 0.0
    x = HBAR * omega_m / (K_B * temperature)
    if x < 1e-6:
        # 1/(e^x - 1) = 1/x - 1/2 + x/12 - ...
        return 1.0 / x - 0.5
    return 1.0 / math.expm1(x)


def temperature_for_occupation(omega_m, nth):
    """Inverse of :func:`thermal_occupation`."""
    if nth < 0:
        raise ValueError(f"nth must be >= 0, got {nth!r}")
    if nth == 0:
        return 0.0
    return HBAR * omega_m / (K_B * math.log1p(1.0 / nth))


def mean_fields(p, delta1, delta2):
    """Intracavity mean fields for given effective detunings (rad/s).

    Closed form ``E_j [kappa_j + i(Delta_{3-j} - zeta)] /
    (zeta^2 + kappa_j^2 - Delta_1 Delta_2 + i kappa_j (Delta_1 + Delta_2))``.
    It solves the coupled stationary mode equations exactly only when the
    two cavities share the same decay rate and drive amplitude; see
    :func:`mean_field_residual`.
    """
    deltas = (delta1, delta2)
    out = []
    for j in (1, 2):
        c = p.cavity(j)
        other = deltas[2 - j]
        num = c.drive_amplitude * complex(c.kappa, other - p.zeta)
        den = complex(p.zeta**2 + c.kappa**2 - delta1 * delta2, c.kappa * (delta1 + delta2))
        out.append(num / den)
    return tuple(out)


def solve_steady_state(p):
    """Self-consistent mean displacements by damped fixed-point iteration.

    Starts from the undriven state ``q = 0`` and relaxes with factor 0.5,
    so the branch continuously connected to zero drive is selected.

    Raises
    ------
    NoConvergence
        After 10 000 iterations (bistable or runaway regime).
    """
    c1, c2 = p.cavity1, p.cavity2
    g0 = (c1.single_photon_coupling, c2.single_photon_coupling)
    d0 = (c1.bare_detuning, c2.bare_detuning)
    wm = (c1.omega_m, c2.omega_m)

    q = [0.0, 0.0]
    step = math.inf
    for it in range(1, FIXED_POINT_MAX_ITER + 1):
        delta = (d0[0] - g0[0] * q[0], d0[1] - g0[1] * q[1])
        alpha = mean_fields(p, *delta)
        target = [g0[j] * abs(alpha[j]) ** 2 / wm[j] for j in (0, 1)]
        new = [(1.0 - RELAXATION) * q[j] + RELAXATION * target[j] for j in (0, 1)]
        changes = [abs(new[j] - q[j]) for j in (0, 1)]
        step = max(changes)
        q = new
        if all(changes[j] <= FIXED_POINT_TOL * max(abs(q[j]), 1e-300) for j in (0, 1)):
            break
    else:
        raise NoConvergence(
            f"mean-field iteration did not converge in {FIXED_POINT_MAX_ITER} steps "
            f"(last step {step:.3e}); use normalized parameters instead"
        )

    delta = (d0[0] - g0[0] * q[0], d0[1] - g0[1] * q[1])
    alpha = mean_fields(p, *delta)
    return SteadyState(
        alpha=alpha,
        q=tuple(q),
        delta=delta,
        drive=(c1.drive_amplitude, c2.drive_amplitude),
        g0=g0,
        iterations=it,
        step=step,
    )


def steady_state_residuals(p, s):
    """Per-cavity residuals of the self-consistency relations at ``s``.

    Returns ``(detuning, displacement)`` residual pairs: detuning in units of
    ``omega_m``, displacement relative to ``max(1, |q|)``.
    """
    out = []
    alpha = mean_fields(p, *s.delta)
    for j in (1, 2):
        c = p.cavity(j)
        g0 = c.single_photon_coupling
        r_delta = abs(s.delta[j - 1] - (c.bare_detuning - g0 * s.q[j - 1])) / c.omega_m
        q_expected = g0 * abs(alpha[j - 1]) ** 2 / c.omega_m
        r_q = abs(s.q[j - 1] - q_expected) / max(1.0, abs(q_expected))
        out.append((r_delta, r_q))
    return tuple(out)


def mean_field_residual(p, s):
    """Residual of the stationary coupled-mode equations
    ``0 = -(kappa_j + i Delta_j) a_j - i zeta a_{3-j} + E_j``, relative to ``E_j``.
    """
    a = s.alpha
    out = []
    for j in (1, 2):
        c = p.cavity(j)
        r = -complex(c.kappa, s.delta[j - 1]) * a[j - 1] - 1j * p.zeta * a[2 - j] + c.drive_amplitude
        out.append(abs(r) / max(c.drive_amplitude, 1e-300))
    return tuple(out)


def effective_coupling(p, s, j):
    """Cavity-enhanced coupling ``G_j`` (rad/s) from the drive power and detunings."""
    c = p.cavity(j)
    d1, d2 = s.delta
    other = s.delta[2 - j]
    num = c.kappa * c.power * (c.kappa**2 + (other - p.zeta) ** 2)
    den = (
        c.mass * c.omega_m * c.omega_l
        * ((p.zeta**2 + c.kappa**2 - d1 * d2) ** 2 + c.kappa**2 * (d1 + d2) ** 2)
    )
    return 2.0 * c.omega_c / c.length * math.sqrt(num / den)


def normalize(p, s):
    """Express the linearised problem in units of the common mechanical frequency."""
    wm1, wm2 = p.cavity1.omega_m, p.cavity2.omega_m
    if abs(wm1 - wm2) > 1e-9 * max(wm1, wm2):
        raise MismatchedMechanicalFrequencies(
            f"omega_m1 = {wm1!r} and omega_m2 = {wm2!r} differ; normalized units need a common value"
        )
    wm = wm1
    c1, c2 = p.cavity1, p.cavity2
    return NormalizedParams(
        delta1=s.delta[0] / wm,
        delta2=s.delta[1] / wm,
        g1=effective_coupling(p, s, 1) / wm,
        g2=effective_coupling(p, s, 2) / wm,
        kappa1=c1.kappa / wm,
        kappa2=c2.kappa / wm,
        gamma1=c1.gamma / wm,
        gamma2=c2.gamma / wm,
        zeta=p.zeta / wm,
        nth1=thermal_occupation(c1.omega_m, c1.temperature),
        nth2=thermal_occupation(c2.omega_m, c2.temperature),
    )


def build_drift(np_):
    """Drift matrix of the linearised quantum Langevin equations.

    The optical rows follow from ``d(da_j)/dt = -(kappa_j + i Delta_j) da_j
    + i G_j/sqrt(2) dq_j - i zeta da_{3-j} + noise`` written in quadratures,
    so the optical diagonal carries ``-kappa_j`` (damping).
    """
    p = np_
    K = np.zeros((8, 8))
    # mechanics (mechanical frequency = 1)
    K[0, 1] = 1.0
    K[1, 0] = -1.0
    K[1, 1] = -p.gamma1
    K[1, 4] = p.g1
    K[2, 3] = 1.0
    K[3, 2] = -1.0
    K[3, 3] = -p.gamma2
    K[3, 6] = p.g2
    # cavity 1
    K[4, 4] = -p.kappa1
    K[4, 5] = p.delta1
    K[4, 7] = p.zeta
    K[5, 0] = p.g1
    K[5, 4] = -p.delta1
    K[5, 5] = -p.kappa1
    K[5, 6] = -p.zeta
    # cavity 2
    K[6, 5] = p.zeta
    K[6, 6] = -p.kappa2
    K[6, 7] = p.delta2
    K[7, 2] = p.g2
    K[7, 4] = -p.zeta
    K[7, 6] = -p.delta2
    K[7, 7] = -p.kappa2
    return K


def build_diffusion(np_):
    p = np_
    return np.diag([
        0.0, p.gamma1 * (2.0 * p.nth1 + 1.0),
        0.0, p.gamma2 * (2.0 * p.nth2 + 1.0),
        p.kappa1, p.kappa1, p.kappa2, p.kappa2,
    ])


def drift_diffusion(np_):
    return DriftDiffusion(K=build_drift(np_), D=build_diffusion(np_))
