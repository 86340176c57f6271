"""
Numerical quantum dilogarithm and the geometry of the braiding operator.
Evaluates the Faddeev function Phi from its q-product or its defining integral,
checks the shift, inversion, Fourier and classical-limit identities, evaluates
the infinite-dimensional matrix element of the R-operator, and computes
octahedron volumes from the Bloch-Wigner function.
"""

import logging
import time
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from braid_classical import apply_R_y_values
from check_report import CheckEntry, CheckReport, CheckStatus, check_entry
from cluster_core import evaluate_seed, flip_exchange_matrix, generic_y_seed, mutate_y
from root_of_unity import ConstraintError, PoleError

logger = logging.getLogger(__name__)

__all__ = [
    "QuadratureError",
    "DilogParams",
    "RInfiniteParams",
    "faddeev_phi",
    "faddeev_log_phi",
    "theta_fn",
    "phi_zero",
    "shift_check",
    "inversion_check",
    "mode_agreement_check",
    "fourier_transform_value",
    "fourier_integral",
    "fourier_transform_check",
    "classical_limit_check",
    "r_infinite_element",
    "r_infinite_quadrature_check",
    "li2",
    "bloch_wigner",
    "five_term_check",
    "tet_shape",
    "octahedron_volume",
    "flip_dihedral_check",
]

TAIL = 1e-17
MAX_TERMS = 2_000_000
# Phi(0) = PHI_ZERO_SIGN * exp(-i pi (b^2 + b^-2) / 24), fixed by the integral at b = 1
PHI_ZERO_SIGN = 1


class QuadratureError(ArithmeticError):
    """Raised when a contour integral does not converge to the requested accuracy."""


@dataclass(frozen=True)
class DilogParams:
    """
    Parameter b of Phi with q = e^{i pi b^2}, qbar = e^{-i pi b^-2}, c_b = (i/2)(b + b^-1).
    ``product`` mode needs Im b^2 > 0; ``integral`` mode needs Re b > 0.
    """

    b: complex
    mode: str = "product"

    def __post_init__(self):
        object.__setattr__(self, "b", complex(self.b))
        if self.mode not in ("product", "integral"):
            raise ConstraintError(f"Unknown Phi mode: {self.mode!r}")
        if self.b == 0:
            raise ConstraintError("b must be nonzero")
        if self.mode == "product" and not (self.b ** 2).imag > 0:
            raise ConstraintError(f"Product mode needs Im b^2 > 0, got b = {self.b}")
        if self.mode == "integral" and not self.b.real > 0:
            raise ConstraintError(f"Integral mode needs Re b > 0, got b = {self.b}")

    @property
    def q(self) -> complex:
        return complex(np.exp(1j * np.pi * self.b ** 2))

    @property
    def qbar(self) -> complex:
        return complex(np.exp(-1j * np.pi / self.b ** 2))

    @property
    def c_b(self) -> complex:
        return 0.5j * (self.b + 1 / self.b)

    @property
    def strip(self) -> float:
        """Half-width of the analyticity strip, Im c_b."""
        return self.c_b.imag

    def with_mode(self, mode: str) -> "DilogParams":
        return DilogParams(self.b, mode)


@dataclass(frozen=True)
class RInfiniteParams:
    """c = c' + c'' and the Phi parameter of the infinite-dimensional R-operator."""

    c1: float
    c2: float
    dilog: DilogParams

    @property
    def c(self) -> float:
        return self.c1 + self.c2


# ---------------------------------------------------------------------------
# Phi


def _log1p_exp(L: np.ndarray) -> np.ndarray:
    """log(1 + e^L) without overflow."""
    out = np.empty_like(L)
    big = L.real > 0
    out[big] = L[big] + np.log1p(np.exp(-L[big]))
    out[~big] = np.log1p(np.exp(L[~big]))
    return out


def _qpoch_log(log_a: complex, log_step: complex, kind: str) -> complex:
    """sum_k log(1 + a r^k) for (-a; r)_inf, truncated once |a r^k| < TAIL."""
    if log_step.real >= 0:
        raise ConstraintError(f"{kind} q-product does not converge")
    terms = int(np.ceil((np.log(TAIL) - log_a.real) / log_step.real)) + 1
    if terms > MAX_TERMS:
        raise ConstraintError(f"{kind} q-product needs {terms} terms; |z|/b too large")
    L = log_a + log_step * np.arange(max(terms, 1))
    logs = _log1p_exp(L)
    if np.any(logs.real < -30):
        raise PoleError(f"{kind} q-product vanishes")
    return complex(np.sum(logs))


def _log_phi_product(z: complex, p: DilogParams) -> complex:
    b = p.b
    numerator = _qpoch_log(-1j * np.pi / b ** 2 + 2 * np.pi * z / b, -2j * np.pi / b ** 2, "numerator")
    try:
        denominator = _qpoch_log(1j * np.pi * b ** 2 + 2 * np.pi * b * z, 2j * np.pi * b ** 2, "denominator")
    except PoleError as exc:
        raise PoleError(f"Phi has a pole at z = {z}") from exc
    return numerator - denominator


def _log_phi_integral(z: complex, p: DilogParams) -> complex:
    """-(1/4) int_{R + i eps} e^{-2izw} / (sinh(bw) sinh(w/b)) dw/w."""
    b = p.b
    half_width = (b.real + (1 / b).real) / 2
    if abs(z.imag) >= half_width:
        raise ConstraintError(f"|Im z| must be < {half_width:.6g} for the integral, got z = {z}")
    eps = 0.5 * np.pi * min(b.real, (1 / b).real)
    with mpmath.workdps(20):
        bb, zz, shift = mpmath.mpc(b), mpmath.mpc(z), mpmath.mpc(0, eps)

        def integrand(x):
            w = x + shift
            return mpmath.exp(-2j * zz * w) / (mpmath.sinh(bb * w) * mpmath.sinh(w / bb) * w)

        value, error = mpmath.quad(integrand, [-mpmath.inf, -5, 0, 5, mpmath.inf], error=True)
    if error > 1e-10 * max(1.0, abs(value)):
        raise QuadratureError(f"Phi integral at z = {z} did not converge (error {float(error):.2e})")
    return -complex(value) / 4


def faddeev_log_phi(z: complex, p: DilogParams, mode: Optional[str] = None) -> complex:
    """
    log Phi(z). The product mode returns a sum of principal logs, so only
    exp() of it is branch-free; the integral mode is the continuous log.

    Raises:
        PoleError: At a pole or zero of Phi
        ConstraintError: Outside the mode's domain
        QuadratureError: If the defining integral does not converge
    """
    mode = mode or p.mode
    z = complex(z)
    if mode == "integral":
        return _log_phi_integral(z, p if p.mode == "integral" else p.with_mode("integral"))
    if mode != "product":
        raise ConstraintError(f"Unknown Phi mode: {mode!r}")
    if not (p.b ** 2).imag > 0:
        raise ConstraintError(f"Product mode needs Im b^2 > 0, got b = {p.b}")
    return _log_phi_product(z, p)


def faddeev_phi(z: complex, p: DilogParams, mode: Optional[str] = None) -> complex:
    """
    Phi(z) = (-qbar e^{2 pi z/b}; qbar^2)_inf / (-q e^{2 pi b z}; q^2)_inf, or the
    exponential of its defining integral.

    Raises:
        PoleError: At a pole of Phi (z = -c_b - i m b - i n/b)
    """
    try:
        return complex(np.exp(faddeev_log_phi(z, p, mode)))
    except PoleError as exc:
        if "numerator" in str(exc):
            return 0j
        raise


def theta_fn(z: complex, p: DilogParams) -> complex:
    """theta(z) = Phi(z) Phi(-z) = exp(-i pi z^2 + i pi (1 + 2 c_b^2) / 6)."""
    z = complex(z)
    return complex(np.exp(-1j * np.pi * z * z + 1j * np.pi * (1 + 2 * p.c_b ** 2) / 6))


def phi_zero(p: DilogParams) -> complex:
    return PHI_ZERO_SIGN * complex(np.exp(-1j * np.pi * (p.b ** 2 + p.b ** -2) / 24))


def _grid(radius: float, height: float, points: int) -> List[complex]:
    xs = np.linspace(-radius, radius, points)
    ys = np.linspace(-height, height, 3)
    return [complex(x, y) for x in xs for y in ys]


def _rel(a: complex, b: complex) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def shift_check(p: DilogParams, zs: Optional[Iterable[complex]] = None, tol: float = 1e-8) -> CheckReport:
    """Phi(z +- ib) = (1 + e^{2 pi b z} q^{+-1})^{+-1} Phi(z) on a grid."""
    zs = list(zs) if zs is not None else _grid(1.0, 0.2, 5)
    report = CheckReport(title="Phi shift relation")
    for sign, label in ((1, "plus"), (-1, "minus")):
        worst = 0.0
        for z in zs:
            lhs = faddeev_phi(z + sign * 1j * p.b, p)
            rhs = (1 + np.exp(2 * np.pi * p.b * z) * p.q ** sign) ** sign * faddeev_phi(z, p)
            worst = max(worst, _rel(lhs, rhs))
        report.add(check_entry(f"phi.shift.{label}", "Phi(z +- i b) = (1 + e^{2 pi b z} q^{+-1})^{+-1} Phi(z)",
                               worst <= tol, metric=worst, tolerance=tol, points=len(zs)))
    return report


def inversion_check(p: DilogParams, zs: Optional[Iterable[complex]] = None, tol: float = 1e-9) -> CheckReport:
    """Phi(z) Phi(-z) / theta(z) = 1 across the analyticity strip."""
    zs = list(zs) if zs is not None else _grid(1.5, 0.5 * p.strip, 7)
    worst = max(abs(faddeev_phi(z, p) * faddeev_phi(-z, p) / theta_fn(z, p) - 1) for z in zs)
    report = CheckReport(title="Phi inversion relation")
    report.add(check_entry("phi.inversion", "theta(z) = Phi(z) Phi(-z)", worst <= tol,
                           metric=worst, tolerance=tol, points=len(zs)))
    zero = _rel(faddeev_phi(0, p), phi_zero(p))
    report.add(check_entry("phi.zero", "Phi(0) = exp(-i pi (b^2 + b^-2) / 24)", zero <= tol,
                           metric=zero, tolerance=tol, sign=PHI_ZERO_SIGN))
    return report


def mode_agreement_check(b: complex = 0.7 * np.exp(0.1j), zs: Sequence[complex] = (0, 0.2 + 0.1j, -0.3),
                         tol: float = 1e-8) -> CheckReport:
    """Product and integral modes agree where both are defined."""
    product, integral = DilogParams(b), DilogParams(b, "integral")
    worst = max(_rel(faddeev_phi(z, product), faddeev_phi(z, integral)) for z in zs)
    report = CheckReport(title="Phi modes")
    report.add(check_entry("phi.modes", "Phi(z) as q-product and as integral", worst <= tol,
                           metric=worst, tolerance=tol, b=[b.real, b.imag]))
    return report


# ---------------------------------------------------------------------------
# Fourier transform


def fourier_transform_value(w: complex, p: DilogParams) -> Tuple[complex, complex]:
    """
    Both closed forms of int Phi(z) e^{2 pi i w z} dz:
    Phi(-w - c_b) e^{i pi w^2 - i pi (1 - 4 c_b^2)/12} and
    e^{-2 pi i w c_b + i pi (1 - 4 c_b^2)/12} / Phi(w + c_b).
    """
    w, c = complex(w), p.c_b
    const = (1 - 4 * c * c) / 12
    first = faddeev_phi(-w - c, p) * np.exp(1j * np.pi * w * w - 1j * np.pi * const)
    second = np.exp(-2j * np.pi * w * c + 1j * np.pi * const) / faddeev_phi(w + c, p)
    return complex(first), complex(second)


def fourier_integral(w: complex, p: DilogParams, tail: float = 1e-10) -> complex:
    """
    int Phi(z) e^{2 pi i w z} dz along a contour made of two rays from 0:
    towards infinity at angle -pi/4, where Phi decays like e^{-i pi z^2}, and
    towards -infinity * e^{i beta}, where Phi -> 1 and the exponential decays.

    Raises:
        QuadratureError: If no decaying left ray exists for w or quadrature fails
    """
    w, b = complex(w), p.b
    margin = np.pi / 3 - abs(np.angle(b))
    ideal = (-np.pi / 2 - np.angle(w) + np.pi) % (2 * np.pi) - np.pi
    beta = float(np.clip(ideal, -margin, margin))
    rate = -(w * np.exp(1j * beta)).imag
    if rate <= 1e-3:
        raise QuadratureError(f"No convergent contour for w = {w}")
    alpha = -np.pi / 4
    left_length = np.log(1 / tail) / (2 * np.pi * rate)
    right_length = abs(w) + np.sqrt(abs(w) ** 2 + np.log(1 / tail) / np.pi)

    def ray(direction: complex, length: float) -> complex:
        def integrand(t):
            z = complex(t) * direction
            return mpmath.mpc(faddeev_phi(z, p) * np.exp(2j * np.pi * w * z))

        nodes = list(np.linspace(0, length, 9))
        value, error = mpmath.quad(integrand, nodes, error=True)
        if error > 1e-8 * max(1.0, abs(value)):
            raise QuadratureError(f"Fourier quadrature for w = {w} failed (error {float(error):.2e})")
        return complex(value) * direction

    return ray(np.exp(1j * alpha), right_length) - ray(-np.exp(1j * beta), left_length)


def fourier_transform_check(ws: Sequence[complex] = (0.3, 0.5 - 0.1j, -0.4 + 0.05j),
                            p: Optional[DilogParams] = None, tol: float = 1e-5) -> CheckReport:
    """Quadrature against the closed forms of the Fourier formula."""
    p = p or DilogParams(0.8 * np.exp(1j * np.pi / 8))
    report = CheckReport(title="Phi Fourier transform")
    anchor = "int Phi(z) e^{2 pi i w z} dz = e^{-2 pi i w c_b + i pi (1 - 4 c_b^2)/12} / Phi(w + c_b)"
    for index, w in enumerate(ws, 1):
        first, second = fourier_transform_value(w, p)
        report.add(check_entry(f"phi.fourier.w{index}.forms", "both closed forms of the Fourier formula",
                               _rel(first, second) <= 1e-10, metric=_rel(first, second), tolerance=1e-10))
        start = time.perf_counter()
        try:
            numeric = fourier_integral(w, p)
        except QuadratureError as exc:
            report.add(CheckEntry(f"phi.fourier.w{index}", anchor, CheckStatus.FAIL, message=str(exc)))
            continue
        deviation = _rel(numeric, second)
        entry = check_entry(f"phi.fourier.w{index}", anchor, deviation <= tol, metric=deviation,
                            tolerance=tol, w=[complex(w).real, complex(w).imag])
        entry.runtime = time.perf_counter() - start
        report.add(entry)
    return report


# ---------------------------------------------------------------------------
# classical limit


def li2(z: complex) -> complex:
    """Principal dilogarithm."""
    return complex(mpmath.polylog(2, z))


def classical_limit_check(z: complex = 0.5, ts: Sequence[float] = (0.2, 0.1, 0.05),
                          angle: float = np.pi / 180, tol: float = 1e-2) -> CheckReport:
    """
    |2 pi i b^2 log Phi(z / 2 pi b) + Li2(-e^z)| -> 0 along b = t e^{i angle}.
    The product log is compared modulo 2 pi i.

    Raises:
        ConstraintError: If the q-product becomes too long for the smallest t
    """
    z = complex(z)
    target = li2(-np.exp(z))
    residuals = []
    for t in ts:
        p = DilogParams(t * np.exp(1j * angle))
        b2 = p.b ** 2
        gap = faddeev_log_phi(z / (2 * np.pi * p.b), p) - 1j * target / (2 * np.pi * b2)
        gap -= 2j * np.pi * round(gap.imag / (2 * np.pi))
        residuals.append(float(abs(2 * np.pi * b2 * gap)))
        logger.debug("classical limit t=%g residual %.3e", t, residuals[-1])
    anchor = "Phi(z / 2 pi b) ~ exp(i Li2(-e^z) / 2 pi b^2)"
    report = CheckReport(title="Phi classical limit")
    trend = all(b < a for a, b in zip(residuals, residuals[1:])) or max(residuals) < 1e-12
    report.add(check_entry("phi.classical.trend", anchor, trend, metric=residuals[-1], residuals=residuals))
    report.add(check_entry("phi.classical.final", anchor, residuals[-1] <= tol,
                           metric=residuals[-1], tolerance=tol))
    return report


# ---------------------------------------------------------------------------
# infinite-dimensional matrix element


def r_infinite_element(x1: float, x2: float, x1p: float, x2p: float, params: RInfiniteParams) -> complex:
    """
    <x1, x2| R |x1', x2'> =
    Phi(x1 - x2) Phi(x2' - x1') / (Phi(x1 - x1' + c_b) Phi(x2' - x2 + c_b))
    * exp(2 pi i (c_b (x1' - x2' - x1 + x2) + c' (x2' - x1) + c'' (x2 - x1') + (1 - 4 c_b^2)/12 - c^2/2)).

    Raises:
        PoleError: On the diagonals x1 = x1' or x2 = x2', where Phi(c_b) = 0
    """
    p, cb = params.dilog, params.dilog.c_b
    if abs(x1 - x1p) < 1e-12 or abs(x2p - x2) < 1e-12:
        raise PoleError("Matrix element is singular at x1 = x1' or x2 = x2'")
    ratio = (faddeev_phi(x1 - x2, p) * faddeev_phi(x2p - x1p, p)
             / (faddeev_phi(x1 - x1p + cb, p) * faddeev_phi(x2p - x2 + cb, p)))
    phase = (cb * (x1p - x2p - x1 + x2) + params.c1 * (x2p - x1) + params.c2 * (x2 - x1p)
             + (1 - 4 * cb * cb) / 12 - params.c ** 2 / 2)
    return complex(ratio * np.exp(2j * np.pi * phase))


def r_infinite_quadrature_check(params: RInfiniteParams, point: Sequence[float] = (0.3, -0.2, -0.1, 0.25),
                                tol: float = 1e-4) -> CheckReport:
    """
    Closed form against Phi(x1 - x2) Phi(x1' - x2')^-1 theta(c + x1' - x2') times
    the two p-integrals, each computed by contour quadrature.
    """
    x1, x2, x1p, x2p = point
    p = params.dilog
    start = time.perf_counter()
    report = CheckReport(title="R-operator matrix element")
    anchor = "<x1, x2| R |x1', x2'> as a ratio of four Phi values"
    try:
        first = np.exp(-2j * np.pi * (x1 - x1p) * params.c1) * fourier_integral(x1 - x1p, p)
        second = np.exp(2j * np.pi * (x2 - x2p) * params.c2) * fourier_integral(-(x2 - x2p), p)
    except QuadratureError as exc:
        report.add(CheckEntry("rinf.quadrature", anchor, CheckStatus.FAIL, message=str(exc)))
        return report
    numeric = (faddeev_phi(x1 - x2, p) / faddeev_phi(x1p - x2p, p)
               * theta_fn(params.c + x1p - x2p, p) * first * second)
    deviation = _rel(numeric, r_infinite_element(x1, x2, x1p, x2p, params))
    entry = check_entry("rinf.quadrature", anchor, deviation <= tol, metric=deviation, tolerance=tol,
                        point=list(point))
    entry.runtime = time.perf_counter() - start
    report.add(entry)
    return report


# ---------------------------------------------------------------------------
# Bloch-Wigner and volumes


def bloch_wigner(z: complex) -> float:
    """D(z) = Im Li2(z) + arg(1 - z) log|z|; 0 on the real line."""
    z = complex(z)
    if z.imag == 0:
        return 0.0
    return float(li2(z).imag + np.angle(1 - z) * np.log(abs(z)))


def five_term_check(samples: int = 100, seed: int = 42, tol: float = 1e-11) -> CheckReport:
    """D(x) + D(y) + D((1-x)/(1-xy)) + D(1-xy) + D((1-y)/(1-xy)) = 0 on random pairs."""
    rng = np.random.default_rng(seed)
    worst, used = 0.0, 0
    while used < samples:
        x, y = (complex(rng.uniform(0.2, 1.8) * np.exp(2j * np.pi * rng.uniform())) for _ in range(2))
        if abs(1 - x * y) < 0.1:
            continue
        s = 1 - x * y
        total = bloch_wigner(x) + bloch_wigner(y) + bloch_wigner((1 - x) / s) + bloch_wigner(s) \
            + bloch_wigner((1 - y) / s)
        worst = max(worst, abs(total))
        used += 1
    report = CheckReport(title="Bloch-Wigner five-term relation")
    report.add(check_entry("volume.five_term", "D(z) = Im Li2(z) + arg(1-z) log|z|", worst <= tol,
                           metric=worst, tolerance=tol, samples=samples))
    return report


def tet_shape(z: complex) -> Tuple[complex, complex, complex]:
    """
    (z, z', z'') with z' = 1 - 1/z and z'' = 1/(1 - z).

    Raises:
        ConstraintError: For the degenerate shapes 0 and 1
    """
    z = complex(z)
    if z == 0 or z == 1:
        raise ConstraintError(f"Degenerate tetrahedron shape {z}")
    return z, 1 - 1 / z, 1 / (1 - z)


def octahedron_volume(y: Sequence[complex], i: int = 1) -> float:
    """
    D(-1/y_{3i+1}) + D(yt_{3i-2}/y_{3i-2}) + D(-yt_{3i+1}) + D(yt_{3i+4}/y_{3i+4})
    with yt = R_i(y). The signed value is returned for non-geometric y.

    Raises:
        BraidError: For a wrong length, generator or degenerate y
        ConstraintError: If y_{3i+1} = 0
    """
    y = [complex(v) for v in y]
    yt = apply_R_y_values(y, i)
    a, left, right = 3 * i, 3 * i - 3, 3 * i + 3
    if y[a] == 0 or y[left] == 0 or y[right] == 0:
        raise ConstraintError("y_{3i-2}, y_{3i+1} and y_{3i+4} must be nonzero")
    return (bloch_wigner(-1 / y[a]) + bloch_wigner(yt[left] / y[left]) + bloch_wigner(-yt[a])
            + bloch_wigner(yt[right] / y[right]))


def flip_dihedral_check(y: Sequence[complex], tol: float = 1e-12) -> CheckReport:
    """
    Mutation at the flipped diagonal against the dihedral update of a glued
    tetrahedron with z_k = -y_k and shape z = -1/y_3.
    """
    if len(y) != 5:
        raise ConstraintError(f"The flip quiver has 5 vertices, got {len(y)} values")
    y = [complex(v) for v in y]
    seed = mutate_y(generic_y_seed(flip_exchange_matrix()), 3)
    mutated = [complex(v) for v in evaluate_seed(seed, {f"y{k}": y[k - 1] for k in range(1, 6)})]
    z, zp, zpp = tet_shape(-1 / y[2])
    predicted = [-y[0] * zp, -y[1] * zpp, z, -y[3] * zpp, -y[4] * zp]
    worst = max(_rel(-m, p) for m, p in zip(mutated, predicted))
    report = CheckReport(title="flip as a glued tetrahedron")
    report.add(check_entry("volume.flip.dihedral", "shape parameter z = -y_3^{-1}", worst <= tol,
                           metric=worst, tolerance=tol))
    consistency = abs(-y[2] * z - 1)
    report.add(check_entry("volume.flip.consistency", "z_3 z = 1", consistency <= tol,
                           metric=consistency, tolerance=tol))
    return report
