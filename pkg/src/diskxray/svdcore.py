"""The SVD triple (Ghat, psihat, sigma) and the spectral pipeline built on it.

Boundary modes are indexed by n >= 0 and unrestricted k in Z; those with
k < 0 or k > n span the kernel of the weighted backprojection and carry no
singular value.  Boundary data are always handled through regular factors
gtilde with g = mu^(2*gamma+1) gtilde.

Phase convention: with Ghat_{n,k} = (-1)^k Phat_{n-k,k} on the disk side,
the boundary side is normalized as psihat = i^n psi / ||psi||, which makes
all singular values strictly positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .quadrature import BoundaryQuadrature
from .specfun import as_gamma, gegenbauer_L, gegenbauer_norm_sq, ln_binomial, ln_gamma
from .xray import Sinogram
from .zernike import CoefficientField

__all__ = [
    "BoundaryMode",
    "SpectrumTable",
    "InversionResult",
    "psi_regular_factor",
    "psi_values",
    "psi_hat_values",
    "psi_norm_sq",
    "sigma",
    "sigma_sq",
    "sigma_sq_beta_form",
    "sigma_ratio",
    "sigma_sq_triangle",
    "funcrel_sigma_sq",
    "funcrel_sigma_sq_beta",
    "analyze",
    "synthesize",
    "invert",
    "range_defect",
    "sobolev_norm",
    "asym_envelope_check",
    "tame_bounds_check",
]


@dataclass(frozen=True)
class BoundaryMode:
    """Boundary basis index: n >= 0, k in Z (kernel modes have k outside [0, n])."""

    n: int
    k: int
    gamma: float

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"n must be nonnegative, got {self.n}")
        object.__setattr__(self, "gamma", as_gamma(self.gamma))


def psi_values(n: int, k: int, gamma, beta, s):
    """Regular factor psitilde on broadcastable (beta, sin alpha) arrays.

    psitilde = ((-1)^n / 2 pi) e^(i (n-2k)(beta+alpha)) L_n^gamma(sin alpha),
    so that psi = mu^(2*gamma+1) psitilde.
    """
    g = as_gamma(gamma)
    beta = np.asarray(beta, dtype=float)
    s = np.asarray(s, dtype=float)
    alpha = np.arcsin(np.clip(s, -1.0, 1.0))
    phase = np.exp(1j * (n - 2 * k) * (beta + alpha))
    return ((-1.0) ** n / (2.0 * math.pi)) * phase * gegenbauer_L(n, g, s)


def psi_regular_factor(mode: BoundaryMode, fb):
    """Regular factor psitilde at a FanBeam (or (beta, alpha) pair)."""
    if hasattr(fb, "beta"):
        beta, alpha = fb.beta, fb.alpha
    else:
        beta, alpha = fb
    out = psi_values(mode.n, mode.k, mode.gamma, beta, math.sin(alpha))
    return complex(out) if np.ndim(out) == 0 else out


def psi_norm_sq(mode: BoundaryMode) -> float:
    """||psi_{n,k}||^2 in L^2(boundary, mu^(-2*gamma)): ||L_n^gamma||^2 / 2 pi."""
    return gegenbauer_norm_sq(mode.n, mode.gamma) / (2.0 * math.pi)


def psi_hat_values(n: int, k: int, gamma, beta, s):
    """Regular factor of the normalized, phase-fixed mode psihat = i^n psi/||psi||."""
    mode = BoundaryMode(n, k, gamma)
    return (1j**n / math.sqrt(psi_norm_sq(mode))) * psi_values(n, k, gamma, beta, s)


def _check_sigma_index(n: int, k: int) -> None:
    if not (0 <= k <= n):
        raise ValueError(f"kernel mode (n, k) = ({n}, {k}) has no singular value")


def sigma_sq(n: int, k: int, gamma) -> float:
    """Squared singular value, Gamma form, in log space:

    sigma^2 = 2^(2g+2) pi C(n,k) Gamma(n-k+g+1) Gamma(k+g+1) / Gamma(n+2g+2).

    The formula is symmetric under k <-> n-k; the evaluation canonicalizes
    the index so that symmetry holds bit-exactly.
    """
    g = as_gamma(gamma)
    _check_sigma_index(n, k)
    k = min(k, n - k)
    return math.exp(
        (2.0 * g + 2.0) * math.log(2.0)
        + math.log(math.pi)
        + ln_binomial(float(n), float(k))
        + ln_gamma(n - k + g + 1.0)
        + ln_gamma(k + g + 1.0)
        - ln_gamma(n + 2.0 * g + 2.0)
    )


def sigma_sq_beta_form(n: int, k: int, gamma) -> float:
    """Squared singular value, Beta-ratio form (independent evaluation):

    sigma^2 = 2^(2g+2) pi / (n+1) * B(n-k+1+g, k+1+g) / B(n-k+1, k+1).
    """
    g = as_gamma(gamma)
    _check_sigma_index(n, k)
    ln_b_num = ln_gamma(n - k + 1.0 + g) + ln_gamma(k + 1.0 + g) - ln_gamma(n + 2.0 * g + 2.0)
    ln_b_den = ln_gamma(n - k + 1.0) + ln_gamma(k + 1.0) - ln_gamma(n + 2.0)
    return math.exp(
        (2.0 * g + 2.0) * math.log(2.0) + math.log(math.pi) - math.log(n + 1.0) + ln_b_num - ln_b_den
    )


def sigma(n: int, k: int, gamma) -> float:
    """Positive singular value sigma_{n,k}^gamma."""
    return math.sqrt(sigma_sq(n, k, gamma))


def sigma_ratio(n: int, k: int, gamma) -> float:
    """Closed-form squared ratio (sigma_{n,k+1}/sigma_{n,k})^2."""
    g = as_gamma(gamma)
    if not (0 <= k <= n - 1):
        raise ValueError(f"need 0 <= k <= n-1, got (n, k) = ({n}, {k})")
    return (n - k) / (n - k + g) * (k + 1.0 + g) / (k + 1.0)


def sigma_sq_triangle(gamma, degree: int) -> list[np.ndarray]:
    """sigma^2 arrays per degree n <= degree, vectorized over k."""
    g = as_gamma(gamma)
    out = []
    for n in range(degree + 1):
        k = np.minimum(np.arange(n + 1, dtype=float), n - np.arange(n + 1, dtype=float))
        ln = (
            (2.0 * g + 2.0) * math.log(2.0)
            + math.log(math.pi)
            + gammaln(n + 1.0)
            - gammaln(k + 1.0)
            - gammaln(n - k + 1.0)
            + gammaln(n - k + g + 1.0)
            + gammaln(k + g + 1.0)
            - gammaln(n + 2.0 * g + 2.0)
        )
        out.append(np.exp(ln))
    return out


def funcrel_sigma_sq(n: int, k: int, gamma) -> float:
    """Diagonal value of the normal operator from the functional relation
    (Gamma form), with the spectral substitutions D -> n, Dw -> n-2k:

    2^(2g+2) pi G(n+1)/G(n+2g+2) * G(n-k+g+1)/G(n-k+1) * G(k+g+1)/G(k+1).
    """
    g = as_gamma(gamma)
    _check_sigma_index(n, k)
    return math.exp(
        (2.0 * g + 2.0) * math.log(2.0)
        + math.log(math.pi)
        + ln_gamma(n + 1.0)
        - ln_gamma(n + 2.0 * g + 2.0)
        + ln_gamma(n - k + g + 1.0)
        - ln_gamma(n - k + 1.0)
        + ln_gamma(k + g + 1.0)
        - ln_gamma(k + 1.0)
    )


def funcrel_sigma_sq_beta(n: int, k: int, gamma) -> float:
    """Beta-ratio line of the functional relation (must agree with the Gamma line)."""
    return sigma_sq_beta_form(n, k, gamma)


@dataclass
class SpectrumTable:
    """Tabulated singular values sigma_{n,k} for n <= degree."""

    gamma: float
    degree: int
    values: list[np.ndarray]  # values[n][k] = sigma_{n,k}

    @classmethod
    def build(cls, gamma, degree: int) -> "SpectrumTable":
        g = as_gamma(gamma)
        return cls(g, int(degree), [np.sqrt(row) for row in sigma_sq_triangle(g, degree)])

    def rows(self):
        for n in range(self.degree + 1):
            for k in range(n + 1):
                s = float(self.values[n][k])
                yield n, k, s, s * s

    def write(self, path) -> None:
        lines = ["n,k,sigma,sigma_sq"]
        for n, k, s, s2 in self.rows():
            lines.append(f"{n},{k},{s:.17g},{s2:.17g}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")


def _require_resolution(rule: BoundaryQuadrature, degree: int, k_extra: int) -> None:
    need_s = degree + 2
    need_beta = 2 * (degree + 2 * k_extra) + 2
    if rule.s_order < need_s or rule.beta_count < need_beta:
        raise ValueError(
            f"boundary rule (beta_count={rule.beta_count}, s_order={rule.s_order}) "
            f"under-resolves degree {degree} with k_extra={k_extra}; "
            f"need beta_count >= {need_beta}, s_order >= {need_s}"
        )


def analyze(sino, degree: int, k_extra: int = 3) -> dict[tuple[int, int], complex]:
    """Boundary-mode coefficients a_{n,k} = <g, psihat_{n,k}> of a sinogram.

    Covers n <= degree and the extended band k in [-k_extra, n + k_extra];
    coefficients with k outside [0, n] measure the component of the data in
    the kernel of the backprojection (range defect).
    """
    rule = sino.rule
    _require_resolution(rule, degree, k_extra)
    beta, _ = rule.grids()
    s = rule.s_nodes[None, :]
    out = {}
    for n in range(degree + 1):
        for k in range(-k_extra, n + k_extra + 1):
            modal = psi_hat_values(n, k, sino.gamma, beta, s)
            out[(n, k)] = complex(rule.pair(sino.values, modal))
    return out


def synthesize(field: CoefficientField, rule: BoundaryQuadrature) -> Sinogram:
    """Exact sinogram of a coefficient field: gtilde = sum f_{n,k} sigma psihat-tilde."""
    if abs(as_gamma(field.gamma) - rule.gamma) > 1e-14:
        raise ValueError(f"field gamma {field.gamma} does not match rule gamma {rule.gamma}")
    beta, _ = rule.grids()
    s = rule.s_nodes[None, :]
    values = np.zeros(rule.shape, dtype=complex)
    for n, k, c in field.modes():
        if c != 0.0:
            values += c * sigma(n, k, field.gamma) * psi_hat_values(n, k, field.gamma, beta, s)
    return Sinogram(gamma=field.gamma, rule=rule, values=values)


@dataclass
class InversionResult:
    """SVD inversion output: recovered field plus the non-invertible kernel band."""

    field: CoefficientField
    kernel: dict[tuple[int, int], complex]
    defect: float


def invert(sino, degree: int, k_extra: int = 3) -> InversionResult:
    """Invert a sinogram through the SVD: f_{n,k} = a_{n,k} / sigma_{n,k}.

    Kernel-band coefficients (k outside [0, n]) are reported, not inverted.
    """
    coeffs = analyze(sino, degree, k_extra)
    field = CoefficientField(sino.gamma, degree)
    kernel = {}
    for (n, k), a in coeffs.items():
        if 0 <= k <= n:
            field.coeffs[field.position(n, k)] = a / sigma(n, k, sino.gamma)
        else:
            kernel[(n, k)] = a
    defect = max((abs(v) for v in kernel.values()), default=0.0)
    return InversionResult(field=field, kernel=kernel, defect=defect)


def range_defect(sino, degree: int, k_extra: int = 3) -> float:
    """Max |<g, psihat_{n,k}>| over the kernel band k in [-k_extra,-1] u [n+1,n+k_extra]."""
    rule = sino.rule
    _require_resolution(rule, degree, k_extra)
    beta, _ = rule.grids()
    s = rule.s_nodes[None, :]
    worst = 0.0
    for n in range(degree + 1):
        for k in list(range(-k_extra, 0)) + list(range(n + 1, n + k_extra + 1)):
            modal = psi_hat_values(n, k, sino.gamma, beta, s)
            worst = max(worst, abs(complex(rule.pair(sino.values, modal))))
    return worst


def sobolev_norm(field: CoefficientField, s: float) -> float:
    """Spectral Sobolev norm sqrt(sum (n+1+gamma)^(2s) |f_{n,k}|^2)."""
    if s < 0:
        raise ValueError("Sobolev order must be nonnegative")
    total = 0.0
    for n in range(field.degree + 1):
        base = n * (n + 1) // 2
        block = field.coeffs[base : base + n + 1]
        total += (n + 1.0 + field.gamma) ** (2.0 * s) * float(np.vdot(block, block).real)
    return math.sqrt(total)


@dataclass
class EnvelopeReport:
    """Outcome of the singular-value structure scan."""

    gamma: float
    degree: int
    extremizers_ok: bool
    lower_band: tuple[float, float]  # min/max over n of env(n)*(n+1)^(-e_min)
    upper_band: tuple[float, float]  # min/max over n of env(n)*(n+1)^(-e_max)

    @property
    def ok(self) -> bool:
        return self.extremizers_ok and self.lower_band[0] > 0.0 and self.upper_band[0] > 0.0


def asym_envelope_check(gamma, degree: int) -> EnvelopeReport:
    """Scan sigma^2 for n <= degree: extremizer locations and envelope bands.

    For gamma < 0 the max over k sits at k in {0, n} and the min at
    floor(n/2); for gamma > 0 the orientation is reversed.  The min envelope
    times (n+1)^(-min(-1,-1-gamma)) and the max envelope times
    (n+1)^(-max(-1,-1-gamma)) must stay in fixed positive bands.
    """
    g = as_gamma(gamma)
    if degree < 2:
        raise ValueError("degree must be >= 2")
    table = sigma_sq_triangle(g, degree)
    e_min = min(-1.0, -1.0 - g)
    e_max = max(-1.0, -1.0 - g)
    extremizers_ok = True
    lo_vals, hi_vals = [], []
    for n in range(1, degree + 1):
        row = table[n]
        kmin = int(np.argmin(row))
        kmax = int(np.argmax(row))
        interior = {n // 2, (n + 1) // 2}  # floor(n/2) and its symmetric twin for odd n
        edge = {0, n}
        if g < 0.0:
            extremizers_ok &= kmin in interior and kmax in edge
        elif g > 0.0:
            extremizers_ok &= kmin in edge and kmax in interior
        lo_vals.append(row.min() * (n + 1.0) ** (-e_min))
        hi_vals.append(row.max() * (n + 1.0) ** (-e_max))
    return EnvelopeReport(
        gamma=g,
        degree=degree,
        extremizers_ok=bool(extremizers_ok),
        lower_band=(float(min(lo_vals)), float(max(lo_vals))),
        upper_band=(float(min(hi_vals)), float(max(hi_vals))),
    )


@dataclass
class TameReport:
    """Two-sided Sobolev bound check for the diagonal normal operator."""

    gamma: float
    order: float
    c_lower: float
    c_upper: float
    worst_lower_slack: float  # min over trials of ||Nf||_s - C1 ||f||_{s+e_min}
    worst_upper_slack: float  # min over trials of C2 ||f||_{s+e_max} - ||Nf||_s
    ok: bool


def tame_bounds_check(gamma, degree: int, s: float, trials: int = 20, seed: int = 0) -> TameReport:
    """Check C1 ||f||_{s+e_min} <= ||N f||_s <= C2 ||f||_{s+e_max} on random fields.

    N acts diagonally by sigma^2; the envelope constants are sharp per-mode
    bounds computed against the (n+1+gamma) Sobolev weight, so the
    inequalities are exact up to rounding.  Requires s + min(-1,-1-gamma) >= 0.
    """
    g = as_gamma(gamma)
    e_min = min(-1.0, -1.0 - g)
    e_max = max(-1.0, -1.0 - g)
    if s + e_min < 0:
        raise ValueError(f"need s >= {-e_min} so all Sobolev exponents are nonnegative")
    table = sigma_sq_triangle(g, degree)
    weights = np.array([n + 1.0 + g for n in range(degree + 1)])
    c_lower = min(float((table[n] * weights[n] ** (-e_min)).min()) for n in range(degree + 1))
    c_upper = max(float((table[n] * weights[n] ** (-e_max)).max()) for n in range(degree + 1))
    rng = np.random.default_rng(seed)
    lo_slack = math.inf
    hi_slack = math.inf
    for _ in range(trials):
        f = CoefficientField.random(g, degree, rng)
        nf = CoefficientField(g, degree, np.concatenate([
            f.coeffs[n * (n + 1) // 2 : n * (n + 1) // 2 + n + 1] * table[n]
            for n in range(degree + 1)
        ]))
        mid = sobolev_norm(nf, s)
        lo_slack = min(lo_slack, mid - c_lower * sobolev_norm(f, s + e_min))
        hi_slack = min(hi_slack, c_upper * sobolev_norm(f, s + e_max) - mid)
    ok = lo_slack >= -1e-9 * c_lower and hi_slack >= -1e-9 * c_upper
    return TameReport(g, s, c_lower, c_upper, lo_slack, hi_slack, ok)
