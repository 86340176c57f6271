"""
Root-of-unity representations of the braiding operator.
Clock and shift matrices, the cyclic dilogarithm family d, w and lambda, the
finite R-matrix built from them, the Kashaev R-matrix, and the delta -> 0 limit
that relates the two up to a diagonal gauge.
"""

import logging
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from scipy import linalg

from check_report import CheckEntry, CheckReport, CheckStatus, check_entry
from exact_algebra import CycloMatrix, Cyclotomic
from quantum_torus import RepresentationError

logger = logging.getLogger(__name__)

__all__ = [
    "PoleError",
    "ConstraintError",
    "RootParams",
    "KappaParams",
    "omega_power",
    "clock_shift",
    "build_Y_rep",
    "delta_fn",
    "d_fn",
    "w_fn",
    "w_multival",
    "lambda_fn",
    "branch_winding",
    "limit_qY_check",
    "build_R_matrix",
    "theta_indicator",
    "pochhammer",
    "pochhammer_identity_check",
    "build_RK",
    "verify_braid_matrix",
    "gauge_compare",
    "limit_dressing",
    "fit_gauge",
    "delta_limit_study",
    "fourier_w_check",
    "lambda_checks",
    "verify_rk",
]

SNAP_TOL = 1e-12
POLE_TOL = 1e-14
MAX_BRAID_N = 16
MAX_PRODUCT_TERMS = 5_000_000

Matrix = Union[np.ndarray, CycloMatrix]


class PoleError(ArithmeticError):
    """Raised when a d/w/Phi evaluation hits a pole or a zero denominator."""


class ConstraintError(ValueError):
    """Raised for parameters outside their admissible region."""


def omega_power(N: int, k) -> complex:
    """omega^k = exp(2 pi i k / N); integer exponents are reduced mod N first."""
    if isinstance(k, (int, np.integer)):
        k = int(k) % N
    return complex(np.exp(2j * np.pi * k / N))


@dataclass(frozen=True)
class RootParams:
    """
    zeta = e^{-2 pi i/N}, zeta^{1/2} = e^{-pi i/N}, omega = zeta^{-1}.
    """

    N: int

    def __post_init__(self):
        if self.N < 1:
            raise ConstraintError(f"N must be at least 1, got {self.N}")

    @property
    def omega(self) -> complex:
        return omega_power(self.N, 1)

    @property
    def zeta(self) -> complex:
        return omega_power(self.N, -1)

    @property
    def zeta_half(self) -> complex:
        return complex(np.exp(-1j * np.pi / self.N))

    @property
    def omega_half(self) -> complex:
        return complex(np.exp(1j * np.pi / self.N))


@dataclass(frozen=True)
class KappaParams:
    """
    Spectral parameters kappa_2, kappa_4, kappa_6 with |kappa| < 1. ``delta`` is
    set in limit-study mode, where kappa_4 = 1 - delta^N.
    """

    k2: complex
    k4: complex
    k6: complex
    delta: Optional[float] = None

    def __post_init__(self):
        for name in ("k2", "k4", "k6"):
            value = getattr(self, name)
            if not abs(value) < 1:
                raise ConstraintError(f"|{name}| must be < 1, got {value}")
            if value == 0:
                raise ConstraintError(f"{name} must be nonzero")

    @classmethod
    def limit(cls, N: int, delta: float, k2: float, k6: float) -> "KappaParams":
        """
        Raises:
            ConstraintError: Unless 0 < delta < 1 and kappa_2, kappa_6 are positive reals below 1
        """
        if not 0 < delta < 1:
            raise ConstraintError(f"delta must lie in (0, 1), got {delta}")
        for name, value in (("k2", k2), ("k6", k6)):
            if isinstance(value, complex) or not 0 < value < 1:
                raise ConstraintError(f"{name} must be a positive real below 1, got {value}")
        return cls(k2, 1 - delta ** N, k6, delta)


# ---------------------------------------------------------------------------
# clock and shift


def clock_shift(N: int, mode: str = "complex") -> Tuple[Matrix, Matrix]:
    """
    Z = diag(omega^0..omega^{N-1}) and the cyclic shift X with X_{j,k} = delta_{j,k-1 mod N}.

    Returns:
        tuple: (Z, X) as numpy arrays, or CycloMatrix over Q(omega) in cyclotomic mode
    """
    if N < 1:
        raise ConstraintError(f"N must be at least 1, got {N}")
    if mode == "cyclotomic":
        Z = CycloMatrix.from_entries(N, N, {(j, j): Cyclotomic.zeta(N, j) for j in range(N)})
        X = CycloMatrix.from_entries(N, N, {((k - 1) % N, k): Cyclotomic.one(N) for k in range(N)})
        return Z, X
    Z = np.diag([omega_power(N, j) for j in range(N)])
    X = np.zeros((N, N), dtype=complex)
    for k in range(N):
        X[(k - 1) % N, k] = 1
    return Z, X


def check_clock_shift(N: int, mode: str = "cyclotomic") -> CheckReport:
    """ZX = omega^-1 XZ and X^N = 1."""
    report = CheckReport(title=f"clock and shift N={N}")
    Z, X = clock_shift(N, mode)
    if mode == "cyclotomic":
        inv_omega = Cyclotomic.zeta(N, -1)
        relation = (Z @ X).equals((X @ Z).scale(inv_omega))
        power = CycloMatrix.identity(N, N)
        for _ in range(N):
            power = power @ X
        order = power.equals(CycloMatrix.identity(N, N))
    else:
        relation = np.allclose(Z @ X, omega_power(N, -1) * X @ Z, atol=1e-12)
        order = np.allclose(np.linalg.matrix_power(X, N), np.eye(N), atol=1e-12)
    report.add(check_entry(f"rk.clock.N{N}.relation", "ZX = omega^-1 XZ", relation, mode=mode))
    report.add(check_entry(f"rk.clock.N{N}.order", "X^N = 1", order, mode=mode))
    return report


def build_Y_rep(N: int, kappa: KappaParams, tol: float = 1e-10) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Y2 = omega^{1/2} k2 X (x) 1, Y4 = omega^{1/2} k4 Z (x) Z^-1, Y6 = omega^{1/2} k6 1 (x) X^-1.

    Raises:
        RepresentationError: If Y_k Y_j = zeta^{b_jk} Y_j Y_k fails
    """
    Z, X = clock_shift(N)
    one = np.eye(N)
    half = RootParams(N).omega_half
    Y2 = half * kappa.k2 * np.kron(X, one)
    Y4 = half * kappa.k4 * np.kron(Z, np.linalg.inv(Z))
    Y6 = half * kappa.k6 * np.kron(one, np.linalg.inv(X))
    zeta = RootParams(N).zeta
    # b_24 = 1, b_46 = -1, b_26 = 0
    for (Yj, Yk, b) in ((Y2, Y4, 1), (Y4, Y6, -1), (Y2, Y6, 0)):
        deviation = np.max(np.abs(Yk @ Yj - zeta ** b * (Yj @ Yk)), initial=0.0)
        if deviation > tol * max(1.0, np.max(np.abs(Yj @ Yk), initial=0.0)):
            raise RepresentationError(f"Y-relation fails with deviation {deviation:.3e} at N={N}")
    return Y2, Y4, Y6


# ---------------------------------------------------------------------------
# cyclic dilogarithm family
#
# The evaluators below accept python/numpy complex or mpmath mpc and keep the
# precision of their input.


def _is_mp(z) -> bool:
    return isinstance(z, (mpmath.mpc, mpmath.mpf))


def _log(z):
    return mpmath.log(z) if _is_mp(z) else complex(np.log(complex(z)))


def _exp(z):
    return mpmath.exp(z) if _is_mp(z) else complex(np.exp(complex(z)))


def _root(N: int, k: int, like=None):
    """omega^k in the precision of ``like``."""
    if _is_mp(like):
        return mpmath.expjpi(mpmath.mpf(2 * (int(k) % N)) / N)
    return omega_power(N, k)


def _as_number(x):
    return x if _is_mp(x) else complex(x)


def _log_one_minus(z, cut_side: int = 1):
    """Principal log(1 - z); points on the negative real axis get arg = cut_side * pi."""
    w = 1 - z
    if abs(w) < POLE_TOL:
        raise PoleError(f"log(1 - z) at z = {z}")
    if w.real < 0 and abs(w.imag) <= SNAP_TOL * (1 + abs(z)):
        logger.debug("Snapping %s onto the branch cut (side %+d)", w, cut_side)
        if _is_mp(w):
            return mpmath.mpc(mpmath.log(-w.real), cut_side * mpmath.pi)
        return complex(np.log(-w.real), cut_side * np.pi)
    return _log(w)


def _cpow(z, s: float):
    if s == 0:
        return 1 + 0j
    if z == 0:
        raise PoleError("Fractional power of zero")
    return _exp(s * _log(z))


def delta_fn(x, N: int, cut_side: int = 1):
    """Delta(x) = (1 - x^N)^(1/N), principal branch."""
    z = _as_number(x) ** N
    if abs(1 - z) < POLE_TOL:
        return 0 * z
    return _exp(_log_one_minus(z, cut_side) / N)


def d_fn(x, N: int, cut_side: int = 1):
    """
    d(x) = (1 - x^N)^{(N-1)/2N} prod_{k=1}^{N-1} (1 - zeta^k x)^{-k/N}, principal
    branch per factor.

    Raises:
        PoleError: At x^N = 1
    """
    x = _as_number(x)
    log_value = (N - 1) / (2 * N) * _log_one_minus(x ** N, cut_side)
    for k in range(1, N):
        log_value -= k / N * _log_one_minus(_root(N, -k, x) * x, cut_side)
    return _exp(log_value)


def _check_fermat(x, y, N: int, tol: float):
    residual = abs(x ** N + y ** N - 1)
    if residual > tol * max(1.0, abs(x) ** N, abs(y) ** N):
        raise ConstraintError(f"x^N + y^N = 1 violated by {float(residual):.3e} (x={x}, y={y}, N={N})")


def w_fn(x, y, n: int, N: int, check: bool = True, tol: float = 1e-10):
    """
    w(x, y|0) = y^{(1-N)/2} prod_{j=1}^{N-1} (1 - omega^-j x)^{j/N} and
    w(x, y|n) = w(x, y|0) prod_{j=1}^{n} y / (1 - omega^j x), n taken mod N.

    Raises:
        ConstraintError: If x^N + y^N != 1
        PoleError: For a vanishing denominator
    """
    x, y = _as_number(x), _as_number(y)
    if check:
        _check_fermat(x, y, N, tol)
    if y == 0 and N > 1:
        raise PoleError(f"w(x, y|n) with y = 0 (x = {x})")
    log_value = (1 - N) / 2 * _log(y) if N > 1 else 0 * x
    for j in range(1, N):
        log_value += j / N * _log_one_minus(_root(N, -j, x) * x)
    value = _exp(log_value)
    for j in range(1, int(n) % N + 1):
        den = 1 - _root(N, j, x) * x
        if abs(den) < POLE_TOL:
            raise PoleError(f"w(x, y|{n}) has a pole at x = {x}")
        value *= y / den
    return value


def w_multival(x, n: int, N: int, cut_side: int = 1):
    """w(x, n) = w(x, Delta(x)|n)."""
    return w_fn(x, delta_fn(x, N, cut_side), n, N, check=False)


def lambda_fn(x, y, N: int):
    """lambda(x, y) = (x/y)^{(N-1)/2} / w(x, y|0) * sum_k 1 / w(y, x|k)."""
    x, y = _as_number(x), _as_number(y)
    prefactor = _cpow(x / y, (N - 1) / 2) / w_fn(x, y, 0, N, check=False)
    return prefactor * sum(1 / w_fn(y, x, k, N, check=False) for k in range(N))


def branch_winding(x, N: int, cut_side: int = 1) -> int:
    """
    Integer m with sum_r Log(1 - omega^r x) = Log(1 - x^N) + 2 pi i m; then
    1/d(omega^n x) = w(x, n) omega^{m n}.
    """
    x = _as_number(x)
    total = sum(_log_one_minus(_root(N, r, x) * x, cut_side) for r in range(N))
    return int(round(complex((total - _log_one_minus(x ** N, cut_side)) / (2j * np.pi)).real))


def _li2(z: complex) -> complex:
    return complex(mpmath.polylog(2, z))


def _q_product_log(x: complex, q2: complex) -> complex:
    """log (x; q2)_inf by a truncated sum of principal logs."""
    if x == 0:
        return 0j
    ratio = abs(q2)
    if ratio >= 1:
        raise ConstraintError(f"(x; q^2) needs |q^2| < 1, got {ratio}")
    terms = int(np.ceil(np.log(1e-17 / abs(x)) / np.log(ratio))) + 1
    if terms > MAX_PRODUCT_TERMS:
        raise ConstraintError(f"q-product truncation needs {terms} terms")
    powers = x * np.exp(np.arange(max(terms, 1)) * np.log(complex(q2)))
    return complex(np.sum(np.log(1 - powers)))


def limit_qY_check(x: complex = 0.4, N: int = 3, eps: Sequence[float] = (1e-1, 1e-2, 1e-3),
                   Y: complex = 0.3, tol: float = 1e-3) -> CheckReport:
    """
    (x; q^2)_inf e^{Li2(x^N)/eps} -> sqrt(1 - x^N) prod (1 - zeta^k x)^{-k/N}, and the
    form (-qY; q^2)_inf e^{Li2(-Y^N)/eps} -> d(zeta^{1/2} Y), as eps -> 0 with
    q = -e^{-eps/2N^2} zeta^{1/2}.

    Raises:
        ConstraintError: If |x| >= 1
    """
    x, Y = complex(x), complex(Y)
    if abs(x) >= 1 or abs(Y) >= 1:
        raise ConstraintError("The q-product limit needs |x| < 1 and |Y| < 1")
    params = RootParams(N)
    target_x = np.sqrt(1 - x ** N + 0j)
    for k in range(1, N):
        target_x *= np.exp(-k / N * _log_one_minus(omega_power(N, -k) * x))
    target_y = d_fn(params.zeta_half * Y, N)
    report = CheckReport(title=f"q-product asymptotics N={N}")
    residuals = {"x": [], "Y": []}
    for e in eps:
        q = -np.exp(-e / (2 * N * N)) * params.zeta_half
        q2 = q * q
        value_x = np.exp(_q_product_log(x, q2) + _li2(x ** N) / e)
        value_y = np.exp(_q_product_log(-q * Y, q2) + _li2(-(Y ** N)) / e)
        residuals["x"].append(float(abs(value_x - target_x)))
        residuals["Y"].append(float(abs(value_y - target_y)))
        logger.debug("eps=%g residuals %.3e %.3e", e, residuals["x"][-1], residuals["Y"][-1])
    anchor = "(x; q^2)_inf ~ e^{-Li2(x^N)/eps} sqrt(1-x^N) prod (1 - zeta^k x)^{-k/N}"
    for form, values in residuals.items():
        decreasing = all(b < a for a, b in zip(values, values[1:])) or all(v < 1e-14 for v in values)
        report.add(check_entry(f"rk.limit_qY.N{N}.{form}.trend", anchor, decreasing,
                               metric=values[-1], residuals=values))
        report.add(check_entry(f"rk.limit_qY.N{N}.{form}.final", anchor, values[-1] <= tol,
                               metric=values[-1], tolerance=tol))
    return report


# ---------------------------------------------------------------------------
# finite R-matrix


def _kappa_values(N: int, kappa: KappaParams, cut_side: int, mp: bool):
    """kappa_2', kappa_4, kappa_6' with Delta(kappa_4^-1) free of cancellation in limit mode."""
    if mp:
        k2, k6 = mpmath.mpc(kappa.k2), mpmath.mpc(kappa.k6)
        if kappa.delta is None:
            k4 = mpmath.mpc(kappa.k4)
            return k2 * delta_fn(1 / k4, N, cut_side), k4, k6 * delta_fn(1 / k4, N, cut_side)
        eps = mpmath.mpf(kappa.delta) ** N
        k4 = mpmath.mpc(1 - eps)
        value = 1 - (1 - eps) ** (-N)
        dk = mpmath.exp(mpmath.mpc(mpmath.log(-value), cut_side * mpmath.pi) / N)
        return k2 * dk, k4, k6 * dk
    k4 = complex(kappa.k4)
    if kappa.delta is None:
        dk = delta_fn(1 / k4, N, cut_side)
    else:
        # 1 - k4 is exact in floating point for k4 near 1
        value = -np.expm1(-N * np.log1p(-float((1 - k4).real)))
        dk = complex(np.exp(complex(np.log(-value), cut_side * np.pi) / N))
    return kappa.k2 * dk, k4, kappa.k6 * dk


def _fourier_closed(x, n: int, N: int, cut_side: int):
    """(1/N) sum_m w(x, m) omega^{m(n + winding)} = (x/y)^{(N-1)/2} / lambda(y, x) / w(y, x|n + winding - 1)."""
    y = delta_fn(x, N, cut_side)
    shift = branch_winding(x, N, cut_side)
    prefactor = _cpow(x / y, (N - 1) / 2) / lambda_fn(y, x, N)
    return prefactor / w_fn(y, x, n + shift - 1, N, check=False)


def build_R_matrix(N: int, kappa: KappaParams, route: str = "d", cut_side: int = 1,
                   dps: Optional[int] = None) -> np.ndarray:
    """
    N^2 x N^2 matrix of the second dominating term of the braiding operator in
    the clock/shift representation, R_{ij,kl} = A_{ij} F2_{ik} F6_{jl} C_{kl}.

    ``d`` evaluates 1/d(...) on the clock diagonals and Fourier-transforms the
    shift factors; ``w`` uses the w-function closed forms with explicit branch
    windings. Rows are i*N + j, columns k*N + l.

    Args:
        dps: Evaluate in mpmath at this many digits; the result is still a complex array

    Raises:
        PoleError: If any d/w evaluation meets a pole
        ConstraintError: For an unknown route
    """
    if route not in ("d", "w"):
        raise ConstraintError(f"Unknown R-matrix route: {route!r}")
    with mpmath.workdps(dps or mpmath.mp.dps):
        return _assemble_R(N, kappa, route, cut_side, mp=dps is not None)


def _assemble_R(N: int, kappa: KappaParams, route: str, cut_side: int, mp: bool) -> np.ndarray:
    k2p, k4, k6p = _kappa_values(N, kappa, cut_side, mp)
    a = k4 * delta_fn(k2p, N) * delta_fn(k6p, N)
    c = _root(N, -1, k4) / k4

    if route == "d":
        A = [1 / d_fn(_root(N, n, a) * a, N, cut_side) for n in range(N)]
        C = [1 / d_fn(_root(N, n, c) * c, N, cut_side) for n in range(N)]
        d2 = [1 / d_fn(_root(N, m, k2p) * k2p, N, cut_side) for m in range(N)]
        d6 = [1 / d_fn(_root(N, -m, k6p) * k6p, N, cut_side) for m in range(N)]
        F2 = [sum(d2[m] * _root(N, m * n, k2p) for m in range(N)) / N for n in range(N)]
        F6 = [sum(d6[m] * _root(N, m * n, k6p) for m in range(N)) / N for n in range(N)]
    else:
        wa, wc = branch_winding(a, N, cut_side), branch_winding(c, N, cut_side)
        A = [w_multival(a, n, N, cut_side) * _root(N, wa * n, a) for n in range(N)]
        C = [w_multival(c, n, N, cut_side) * _root(N, wc * n, c) for n in range(N)]
        F2 = [_fourier_closed(k2p, n, N, cut_side) for n in range(N)]
        # F6 is indexed by j - l; its closed form is read at l - j
        F6 = [_fourier_closed(k6p, -n, N, cut_side) for n in range(N)]

    R = np.zeros((N * N, N * N), dtype=complex)
    for i, j, k, l in product(range(N), repeat=4):
        R[i * N + j, k * N + l] = complex(A[(i - j) % N] * F2[(i - k) % N] * F6[(j - l) % N] * C[(l - k) % N])
    return R


# ---------------------------------------------------------------------------
# Kashaev R-matrix


def theta_indicator(i: int, j: int, k: int, l: int, N: int) -> int:
    """1 iff [i-j] + [j-l] + [l-k-1] + [k-i] = N - 1, brackets reduced mod N."""
    total = (i - j) % N + (j - l) % N + (l - k - 1) % N + (k - i) % N
    return int(total == N - 1)


def pochhammer(N: int, n: int, conjugate: bool = False, mode: str = "complex"):
    """(omega; omega)_n, or its conjugate (omega^-1; omega^-1)_n."""
    sign = -1 if conjugate else 1
    if mode == "cyclotomic":
        value = Cyclotomic.one(N)
        for s in range(1, n + 1):
            value = value * (1 - Cyclotomic.zeta(N, sign * s))
        return value
    value = 1 + 0j
    for s in range(1, n + 1):
        value *= 1 - omega_power(N, sign * s)
    return value


def pochhammer_identity_check(N: int) -> CheckReport:
    """(omega)_{[n]} conj(omega)_{[-n-1]} = N for every residue n, exactly."""
    report = CheckReport(title=f"Pochhammer identity N={N}")
    failures = [n for n in range(N)
                if pochhammer(N, n, mode="cyclotomic") * pochhammer(N, (-n - 1) % N, True, "cyclotomic") != N]
    report.add(check_entry(f"rk.pochhammer.N{N}", "(omega)_[n] conj(omega)_[-n-1] = N", not failures,
                           failing=failures))
    return report


def build_RK(N: int, mode: str = "complex", corrupt: bool = False) -> Matrix:
    """
    Kashaev R-matrix
    N omega^{-1+i-k} theta / ((omega)_[i-j] conj(omega)_[j-l] (omega)_[l-k-1] conj(omega)_[k-i]).

    The cyclotomic build inverts the Pochhammer symbols through
    1/(omega)_[n] = conj(omega)_[-n-1] / N. ``corrupt`` flips the sign of the
    (0,0,0,1) entry, a negative control for the braid check.
    """
    if N < 1:
        raise ConstraintError(f"N must be at least 1, got {N}")
    if mode == "cyclotomic":
        poch = [pochhammer(N, n, mode="cyclotomic") for n in range(N)]
        cpoch = [pochhammer(N, n, True, "cyclotomic") for n in range(N)]
        scale = Fraction(1, N ** 3)
        entries: Dict[Tuple[int, int], Cyclotomic] = {}
        for i, j, k, l in product(range(N), repeat=4):
            if not theta_indicator(i, j, k, l, N):
                continue
            value = (Cyclotomic.zeta(N, -1 + i - k) * cpoch[(j - i - 1) % N] * poch[(l - j - 1) % N]
                     * cpoch[(k - l) % N] * poch[(i - k - 1) % N]) * scale
            if corrupt and (i, j, k, l) == (0, 0, 0, 1):
                value = -value
            entries[(i * N + j, k * N + l)] = value
        return CycloMatrix.from_entries(N, N * N, entries)

    poch = [pochhammer(N, n) for n in range(N)]
    cpoch = [pochhammer(N, n, True) for n in range(N)]
    RK = np.zeros((N * N, N * N), dtype=complex)
    for i, j, k, l in product(range(N), repeat=4):
        if not theta_indicator(i, j, k, l, N):
            continue
        value = N * omega_power(N, -1 + i - k) / (
            poch[(i - j) % N] * cpoch[(j - l) % N] * poch[(l - k - 1) % N] * cpoch[(k - i) % N]
        )
        if corrupt and (i, j, k, l) == (0, 0, 0, 1):
            value = -value
        RK[i * N + j, k * N + l] = value
    return RK


def verify_braid_matrix(M: Matrix, N: int, label: str = "R", tol: float = 1e-9,
                        gated: bool = True) -> CheckReport:
    """
    (M (x) 1)(1 (x) M)(M (x) 1) = (1 (x) M)(M (x) 1)(1 (x) M) on V^{(x)3}.

    Exact for CycloMatrix input; relative max-entry deviation for arrays.
    ``gated=False`` records the deviation as INFO.

    Raises:
        RepresentationError: For N beyond the dense guard or a wrong dimension
    """
    if N > MAX_BRAID_N:
        raise RepresentationError(f"Braid check limited to N <= {MAX_BRAID_N}, got {N}")
    report = CheckReport(title=f"braid relation {label} N={N}")
    anchor = "(R x 1)(1 x R)(R x 1) = (1 x R)(R x 1)(1 x R)"
    start = time.perf_counter()
    if isinstance(M, CycloMatrix):
        if M.dim != N * N:
            raise RepresentationError(f"Expected dimension {N * N}, got {M.dim}")
        one = CycloMatrix.identity(M.m, N)
        left, right = M.kron(one), one.kron(M)
        ok = (left @ right @ left).equals(right @ left @ right)
        entry = check_entry(f"rk.braid.{label}.N{N}", anchor, ok, metric=0.0 if ok else None, mode="cyclotomic")
    else:
        if M.shape != (N * N, N * N):
            raise RepresentationError(f"Expected shape {(N * N, N * N)}, got {M.shape}")
        one = np.eye(N)
        left, right = np.kron(M, one), np.kron(one, M)
        lhs, rhs = left @ right @ left, right @ left @ right
        deviation = float(np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(lhs))))
        if gated:
            entry = check_entry(f"rk.braid.{label}.N{N}", anchor, deviation <= tol,
                                metric=deviation, tolerance=tol, mode="complex")
        else:
            entry = CheckEntry(f"rk.braid.{label}.N{N}", anchor, CheckStatus.INFO, metric=deviation,
                               details={"mode": "complex"})
    entry.runtime = time.perf_counter() - start
    report.add(entry)
    return report


def verify_rk(N: int, mode: str = "complex") -> CheckReport:
    """Pochhammer self-test and braid relation of the Kashaev matrix."""
    report = pochhammer_identity_check(N)
    report.extend(verify_braid_matrix(build_RK(N, mode), N, label=f"RK.{mode}"))
    return report


# ---------------------------------------------------------------------------
# gauge and the delta -> 0 limit


def _support(N: int) -> np.ndarray:
    mask = np.zeros((N * N, N * N), dtype=bool)
    for i, j, k, l in product(range(N), repeat=4):
        mask[i * N + j, k * N + l] = bool(theta_indicator(i, j, k, l, N))
    return mask


def limit_dressing(N: int, k2: float, k6: float) -> np.ndarray:
    """
    Diagonal dressing D with R -> rho D R^K as delta -> 0:
    beta^[i-j] k2^[k-i] k6^[j-l] omega^{-[i-j]/2} omega^{k-i}, beta = (1 - k2^N - k6^N)^{1/N}.
    """
    beta = (1 - k2 ** N - k6 ** N) ** (1 / N)
    D = np.zeros((N * N, N * N), dtype=complex)
    for i, j, k, l in product(range(N), repeat=4):
        D[i * N + j, k * N + l] = (
            beta ** ((i - j) % N) * k2 ** ((k - i) % N) * k6 ** ((j - l) % N)
            * np.exp(-1j * np.pi * ((i - j) % N) / N) * omega_power(N, k - i)
        )
    return D


@dataclass
class GaugeFit:
    rho: complex
    deviation: float
    support_match: bool
    off_support: float


def gauge_compare(R: np.ndarray, RK: Matrix, N: int, gauge: Optional[np.ndarray] = None,
                  tol: float = 1e-2, check_id: Optional[str] = None) -> Tuple[CheckReport, GaugeFit]:
    """
    Fit rho from the first entry where R and gauge * R^K are both nonzero, then
    report the max relative deviation of R from rho * gauge * R^K over the
    theta-support and the relative size of R off the support.

    Raises:
        ConstraintError: If no entry is nonzero in both matrices
    """
    if isinstance(RK, CycloMatrix):
        RK = RK.to_numpy()
    model = RK * (gauge if gauge is not None else 1)
    mask = _support(N)
    scale = np.max(np.abs(R[mask]), initial=0.0)
    candidates = [(r, c) for r, c in zip(*np.nonzero(mask))
                  if abs(R[r, c]) > 1e-300 and abs(model[r, c]) > 1e-300]
    if not candidates:
        raise ConstraintError("gauge_compare needs an entry that is nonzero in both matrices")
    r0, c0 = candidates[0]
    rho = complex(R[r0, c0] / model[r0, c0])
    on = np.abs(R[mask] - rho * model[mask]) / np.maximum(np.abs(R[mask]), 1e-300)
    deviation = float(np.max(on))
    off = float(np.max(np.abs(R[~mask]), initial=0.0) / scale) if scale else 0.0
    fit = GaugeFit(rho, deviation, bool(np.all(np.abs(model[~mask]) == 0)), off)
    report = CheckReport(title=f"gauge comparison N={N}")
    report.add(check_entry(check_id or f"rk.gauge.N{N}", "R = rho * gauge * R^K up to a simple gauge transformation",
                           deviation <= tol, metric=deviation, tolerance=tol,
                           rho=rho, off_support=off))
    return report, fit


def fit_gauge(R: np.ndarray, RK: Matrix, N: int) -> Dict[str, object]:
    """
    Brute-force the half-integer omega-powers of [i-j], [k-i], [j-l] and
    least-squares the log-magnitudes, so that R ~ rho * gauge * R^K on the support.

    Returns:
        dict: phase exponents (units of omega^{1/2}), magnitude bases, rho, deviation
    """
    if isinstance(RK, CycloMatrix):
        RK = RK.to_numpy()
    rows = []
    for i, j, k, l in product(range(N), repeat=4):
        r, c = i * N + j, k * N + l
        if theta_indicator(i, j, k, l, N) and abs(RK[r, c]) > 0 and abs(R[r, c]) > 0:
            rows.append(((i - j) % N, (k - i) % N, (j - l) % N, R[r, c] / RK[r, c]))
    if not rows:
        raise ConstraintError("fit_gauge needs overlapping nonzero entries")
    regressors = np.array([row[:3] for row in rows], dtype=float)
    ratios = np.array([row[3] for row in rows])
    design = np.column_stack([np.ones(len(rows)), regressors])
    coeffs, *_ = linalg.lstsq(design, np.log(np.abs(ratios)))
    phases = np.angle(ratios / ratios[0])
    best, best_err = (0, 0, 0), np.inf
    for exps in product(range(2 * N), repeat=3):
        model = np.pi / N * (regressors - regressors[0]) @ np.array(exps)
        err = np.max(np.abs(np.angle(np.exp(1j * (phases - model)))))
        if err < best_err:
            best, best_err = exps, err
    gauge = np.exp(design @ coeffs) * np.exp(1j * np.pi / N * regressors @ np.array(best))
    rho = complex(np.mean(ratios / gauge))
    deviation = float(np.max(np.abs(ratios - rho * gauge) / np.abs(ratios)))
    return {
        "phase_exponents": [int(e) for e in best],
        "magnitude_bases": [float(v) for v in np.exp(coeffs[1:])],
        "rho": rho,
        "deviation": deviation,
    }


def delta_limit_study(N: int = 3, deltas: Sequence[float] = (1e-1, 1e-2, 1e-3), k2: float = 0.4,
                      k6: float = 0.3, tol: float = 1e-2, dps: Optional[int] = 40) -> CheckReport:
    """
    Build R with kappa_4 = 1 - delta^N for a decreasing delta sequence and compare
    with the dressed Kashaev matrix. Gated: strictly decreasing deviation, final
    deviation within ``tol``, positive power-law exponent, vanishing off-support
    entries, and failure of the opposite branch-cut side. R is evaluated at
    ``dps`` digits since its small factors scale like delta^N.
    """
    report = CheckReport(title=f"delta limit N={N}")
    RK = build_RK(N)
    dressing = limit_dressing(N, k2, k6)
    deviations, offs = [], []
    for index, delta in enumerate(deltas, 1):
        kappa = KappaParams.limit(N, delta, k2, k6)
        try:
            R = build_R_matrix(N, kappa, dps=dps)
        except PoleError as exc:
            logger.warning("delta=%g hits a pole (%s); stopping the sequence", delta, exc)
            report.add(CheckEntry(f"rk.limit.N{N}.delta{index}", "kappa_4 = 1 - delta^N", CheckStatus.SKIP,
                                  message=str(exc)))
            break
        _, fit = gauge_compare(R, RK, N, dressing)
        deviations.append(fit.deviation)
        offs.append(fit.off_support)
        report.add(CheckEntry(f"rk.limit.N{N}.delta{index}", "kappa_4 = 1 - delta^N", CheckStatus.INFO,
                              metric=fit.deviation, details={"delta": delta, "off_support": fit.off_support,
                                                             "rho": fit.rho}))
    used = list(deltas)[:len(deviations)]
    if N == 1:
        report.add(check_entry(f"rk.limit.N{N}.final", "R -> rho R^K", max(deviations, default=0) <= tol,
                               metric=max(deviations, default=0.0), tolerance=tol))
        return report

    decreasing = len(deviations) >= 2 and all(b < a for a, b in zip(deviations, deviations[1:]))
    report.add(check_entry(f"rk.limit.N{N}.decreasing", "dominating term as delta -> 0", decreasing,
                           deviations=deviations))
    report.add(check_entry(f"rk.limit.N{N}.final", "R -> rho omega-gauge R^K", bool(deviations) and deviations[-1] <= tol,
                           metric=deviations[-1] if deviations else None, tolerance=tol))
    exponent = None
    if len(deviations) >= 2 and min(deviations) > 0:
        exponent = float(np.polyfit(np.log(used), np.log(deviations), 1)[0])
    report.add(check_entry(f"rk.limit.N{N}.power", "deviation ~ delta^p with p > 0",
                           exponent is not None and exponent > 0, metric=exponent))
    support = len(offs) >= 2 and all(b < a for a, b in zip(offs, offs[1:]))
    report.add(check_entry(f"rk.limit.N{N}.support", "support tends to the theta indicator", support,
                           metric=offs[-1] if offs else None, off_support=offs))

    smallest = KappaParams.limit(N, used[-1], k2, k6) if used else None
    if smallest is not None:
        flipped = build_R_matrix(N, smallest, cut_side=-1, dps=dps)
        _, flipped_fit = gauge_compare(flipped, RK, N, dressing)
        report.add(check_entry(f"rk.limit.N{N}.branch", "w(omega^-1 kappa_4^-1, l-k) crosses a branch cut",
                               flipped_fit.deviation > 10 * tol, metric=flipped_fit.deviation,
                               message="opposite cut side must break the gauge"))
        fitted = fit_gauge(build_R_matrix(N, smallest, dps=dps), RK, N)
        report.add(CheckEntry(f"rk.limit.N{N}.fit", "brute-force gauge fit", CheckStatus.INFO,
                              metric=fitted["deviation"], details=fitted))
    return report


# ---------------------------------------------------------------------------
# w-function identities


def _admissible_pairs(N: int, count: int, rng: np.random.Generator) -> List[Tuple[complex, complex]]:
    """(x, y) = (u^{1/N}, (1-u)^{1/N}) with u in the disc |u - 1/2| < 0.45."""
    out = []
    for _ in range(count):
        u = 0.5 + 0.45 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        out.append((complex(u ** (1 / N)), complex((1 - u) ** (1 / N))))
    return out


def _rel(a: complex, b: complex, scale: float) -> float:
    return abs(a - b) / max(scale, 1e-300)


def fourier_w_check(N: int, samples: int = 100, seed: int = 42, tol: float = 1e-9) -> CheckReport:
    """
    Terminating q-series identity at q = omega, the inverse and Fourier
    transforms of w, w(x,y|n+N) = w(x,y|n), w(x,y|n) = w(omega^n x, y|0),
    prod_k w(x,y|k) = 1 and w(x, 0) = 1/d(x), on random admissible samples.
    """
    if N < 2:
        raise ConstraintError(f"fourier_w_check needs N >= 2, got {N}")
    rng = np.random.default_rng(seed)
    worst = {name: 0.0 for name in ("omega_identity", "w_inverse", "fourier_w", "w_modulo",
                                    "w_omega_n", "product", "w_and_d")}
    s = (N - 1) / 2
    for _ in range(samples):
        b = complex(rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform()))
        z = complex(rng.uniform(0.5, 1.5) * np.exp(2j * np.pi * rng.uniform()))
        omega = omega_power(N, 1)
        lhs_terms = [pochhammer_q(b, omega, k) * z ** k for k in range(N)]
        rhs_terms = [pochhammer_q(omega / z, omega, k) * (omega / b) ** k for k in range(N)]
        lhs = sum(lhs_terms)
        rhs = (b * z / omega) ** (N - 1) * sum(rhs_terms)
        scale = sum(abs(t) for t in lhs_terms)
        worst["omega_identity"] = max(worst["omega_identity"], _rel(lhs, rhs, scale))

    for x, y in _admissible_pairs(N, samples, rng):
        w = [w_fn(x, y, k, N) for k in range(N)]
        lam = lambda_fn(x, y, N)
        lam_yx = lambda_fn(y, x, N)
        for n in range(N):
            terms = [omega_power(N, -n * k) / w[k] for k in range(N)]
            rhs = omega_power(N, n) * w_fn(y * omega_power(N, n), x, 0, N, check=False) * _cpow(x / y, s) * lam
            worst["w_inverse"] = max(worst["w_inverse"], _rel(sum(terms), rhs, sum(abs(t) for t in terms)))
            terms = [w[k] * omega_power(N, n * k) for k in range(N)]
            rhs = N * _cpow(x / y, s) / lam_yx / w_fn(y, x, n - 1, N, check=False)
            worst["fourier_w"] = max(worst["fourier_w"], _rel(sum(terms), rhs, sum(abs(t) for t in terms)))
            worst["w_modulo"] = max(worst["w_modulo"], _rel(w_fn(x, y, n + N, N), w[n], abs(w[n])))
            shifted = w_fn(omega_power(N, n) * x, y, 0, N, check=False)
            worst["w_omega_n"] = max(worst["w_omega_n"], _rel(shifted, w[n], abs(w[n])))
        worst["product"] = max(worst["product"], abs(np.prod(w) - 1))
        worst["w_and_d"] = max(worst["w_and_d"], _rel(w_multival(x, 0, N), 1 / d_fn(x, N), abs(1 / d_fn(x, N))))

    anchors = {
        "omega_identity": "sum (b; omega)_k z^k = (bz/omega)^{N-1} sum (omega/z; omega)_k (omega/b)^k",
        "w_inverse": "sum omega^{-nk} / w(x,y|k) = omega^n w(y omega^n, x|0) (x/y)^{(N-1)/2} lambda(x,y)",
        "fourier_w": "sum w(x,y|k) omega^{nk} = N (x/y)^{(N-1)/2} / lambda(y,x) / w(y,x|n-1)",
        "w_modulo": "w(x,y|n+N) = w(x,y|n)",
        "w_omega_n": "w(x,y|n) = w(omega^n x, y|0)",
        "product": "prod_k w(x,y|k) = 1",
        "w_and_d": "w(x,0) = 1/d(x)",
    }
    report = CheckReport(title=f"w-function identities N={N}")
    for name, value in worst.items():
        report.add(check_entry(f"rk.fourier.N{N}.{name}", anchors[name], value <= tol,
                               metric=value, tolerance=tol, samples=samples))
    return report


def pochhammer_q(a: complex, q: complex, k: int) -> complex:
    """(a; q)_k."""
    value = 1 + 0j
    for s in range(k):
        value *= 1 - a * q ** s
    return value


def lambda_checks(N: int, samples: int = 20, seed: int = 42, tol: float = 1e-9) -> CheckReport:
    """
    lambda(x, omega y) = lambda(x, y) on admissible samples (up to sign for even
    N, where the half-integer power changes sheet) and the x -> 1 limit
    N prod_j (1 - omega^-j)^{-j/N}, checked as a decreasing trend.
    """
    rng = np.random.default_rng(seed)
    report = CheckReport(title=f"lambda N={N}")
    if N >= 3:
        worst = 0.0
        for x, y in _admissible_pairs(N, samples, rng):
            base = lambda_fn(x, y, N)
            moved = lambda_fn(x, omega_power(N, 1) * y, N)
            if N % 2 == 0:
                deviation = min(abs(moved - base), abs(moved + base)) / abs(base)
            else:
                deviation = abs(moved - base) / abs(base)
            worst = max(worst, deviation)
        report.add(check_entry(f"rk.lambda.N{N}.invariance",
                               "lambda(x, omega y) = lambda(x, y)" + (" up to sign" if N % 2 == 0 else ""),
                               worst <= tol, metric=worst, tolerance=tol))
    limit = N + 0j
    for j in range(1, N):
        limit *= np.exp(-j / N * _log_one_minus(omega_power(N, -j)))
    gaps = []
    for exponent in (4, 8, 12):
        x = 1 - 10.0 ** (-exponent)
        gaps.append(abs(lambda_fn(x, delta_fn(x, N), N) - limit) / abs(limit))
    trend = all(b < a for a, b in zip(gaps, gaps[1:])) or max(gaps) < 1e-12
    report.add(check_entry(f"rk.lambda.N{N}.limit", "lambda(x,y) -> N prod (1 - omega^-j)^{-j/N} as x -> 1",
                           trend, metric=gaps[-1], gaps=gaps))
    return report
