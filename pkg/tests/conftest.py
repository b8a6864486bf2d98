import numpy as np
import pytest

from steersim.sweep import GAMMA, KAPPA

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_RESULTS, key=lambda c: int(c.split("-")[1])):
        ok, detail = ACCEPTANCE_RESULTS[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} {cid}: {detail}")


# two-mode symplectic building blocks, ordering (q1, p1, q2, p2)
def rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s], [-s, c]])


def local(s1, s2):
    out = np.zeros((4, 4))
    out[:2, :2] = s1
    out[2:, 2:] = s2
    return out


def squeezer(r):
    return np.diag([np.exp(-r), np.exp(r)])


def two_mode_squeezer(r):
    c, s = np.cosh(r), np.sinh(r)
    Z = np.diag([1.0, -1.0])
    return np.block([[c * np.eye(2), s * Z], [s * Z, c * np.eye(2)]])


def beam_splitter(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.block([[c * np.eye(2), s * np.eye(2)], [-s * np.eye(2), c * np.eye(2)]])


def tmsv(r):
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    Z = np.diag([1.0, -1.0])
    return 0.5 * np.block([[c * np.eye(2), s * Z], [s * Z, c * np.eye(2)]])


def random_symplectic(rng):
    S = local(rot(rng.uniform(0, 2 * np.pi)), rot(rng.uniform(0, 2 * np.pi)))
    S = local(squeezer(rng.uniform(-1, 1)), squeezer(rng.uniform(-1, 1))) @ S
    S = two_mode_squeezer(rng.uniform(0, 1.5)) @ S
    S = beam_splitter(rng.uniform(0, np.pi)) @ S
    S = local(rot(rng.uniform(0, 2 * np.pi)), rot(rng.uniform(0, 2 * np.pi))) @ S
    return S


def random_physical_cov(rng):
    """Thermal state with random occupations pushed through a random symplectic map."""
    nu1, nu2 = 0.5 + rng.exponential(2.0, size=2)
    S = random_symplectic(rng)
    V = S @ np.diag([nu1, nu1, nu2, nu2]) @ S.T
    return 0.5 * (V + V.T)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def figure_rates():
    return {"kappa": KAPPA, "gamma": GAMMA}
