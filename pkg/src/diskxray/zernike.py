"""Generalized Zernike (disk polynomial) basis and the operators acting on it.

The basis element indexed by (n, k), 0 <= k <= n, is built from the disk
polynomial P_{n-k,k}^gamma (orthogonal under the weight (1-|z|^2)^gamma); its
polar dependency is e^(i(n-2k) omega) and its degree is n.  The orthonormal
family used throughout carries the phase convention

    Ghat_{n,k} = (-1)^k * P_{n-k,k}^gamma / ||P_{n-k,k}^gamma||,

which makes the derivative ladders below hold with real coefficients.
Coefficient fields store the dense lower-triangular array of expansion
coefficients in this orthonormal basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import DiskPoint
from .specfun import (
    JacobiParams,
    as_gamma,
    gegenbauer_L,
    gegenbauer_leading_coeff,
    jacobi_eval,
    ln_binomial,
    ln_gamma,
)

__all__ = [
    "ZernikeIndex",
    "CoefficientField",
    "disk_poly",
    "zernike_norm_sq",
    "leading_coeff_p",
    "g_leading_coeff",
    "G_eval",
    "G_hat_eval",
    "G_fourier_oracle",
    "apply_L_gamma",
    "apply_D_omega",
    "d_dz",
    "d_dzbar",
    "L_gamma_pointwise",
    "write_coefficients",
    "read_coefficients",
]


@dataclass(frozen=True)
class ZernikeIndex:
    """Index (n, k) of the disk basis, 0 <= k <= n, at weight gamma."""

    n: int
    k: int
    gamma: float

    def __post_init__(self):
        if self.n < 0 or not (0 <= self.k <= self.n):
            raise ValueError(f"need 0 <= k <= n, got (n, k) = ({self.n}, {self.k})")
        object.__setattr__(self, "gamma", as_gamma(self.gamma))


def _as_complex(p):
    """Accept DiskPoint, complex scalar, or complex ndarray."""
    if isinstance(p, DiskPoint):
        return p.z
    return np.asarray(p, dtype=complex) if isinstance(p, np.ndarray) else complex(p)


def disk_poly(m: int, l: int, gamma, p):
    """Disk polynomial P_{m,l}^gamma(z, zbar).

    For m >= l this is (l! gamma!/(l+gamma)!) z^(m-l) P_l^(gamma, m-l)(2|z|^2-1);
    the m < l branch is the conjugate-symmetric one, so that
    P_{m,l}(z) = conj(P_{l,m}(z)).
    """
    g = as_gamma(gamma)
    if m < 0 or l < 0:
        raise ValueError("disk polynomial indices must be nonnegative")
    z = _as_complex(p)
    # domain check with slack for boundary-hugging difference stencils
    if np.any(np.abs(z) > 1.0 + 1e-6):
        raise ValueError("evaluation point outside the closed unit disk")
    if m < l:
        return np.conj(disk_poly(l, m, g, z))
    x = 2.0 * np.abs(z) ** 2 - 1.0
    pref = math.exp(ln_gamma(l + 1.0) + ln_gamma(g + 1.0) - ln_gamma(l + g + 1.0))
    return pref * z ** (m - l) * jacobi_eval(JacobiParams(l, g, m - l), x)


def zernike_norm_sq(idx: ZernikeIndex) -> float:
    """||P_{n-k,k}^gamma||^2 in L^2(disk, d^gamma), via log space."""
    n, k, g = idx.n, idx.k, idx.gamma
    return math.exp(
        math.log(math.pi)
        - math.log(n + g + 1.0)
        + ln_gamma(n - k + 1.0)
        + 2.0 * ln_gamma(g + 1.0)
        + ln_gamma(k + 1.0)
        - ln_gamma(k + g + 1.0)
        - ln_gamma(n - k + g + 1.0)
    )


def leading_coeff_p(idx: ZernikeIndex) -> float:
    """Coefficient of z^(n-k) zbar^k in P_{n-k,k}^gamma."""
    n, k, g = idx.n, idx.k, idx.gamma
    return math.exp(
        ln_gamma(g + 1.0) + ln_gamma(n + g + 1.0) - ln_gamma(n - k + g + 1.0) - ln_gamma(k + g + 1.0)
    )


def g_leading_coeff(idx: ZernikeIndex) -> complex:
    """Top coefficient (-1)^k l_n^gamma (2i)^(-n) C(n, k) of the backprojected mode."""
    n, k, g = idx.n, idx.k, idx.gamma
    mag = math.exp(
        math.log(gegenbauer_leading_coeff(n, g)) - n * math.log(2.0) + ln_binomial(float(n), float(k))
    )
    return mag * (-1.0) ** k * (-1j) ** n


def G_eval(idx: ZernikeIndex, p):
    """The raw backprojected basis element G_{n,k}^gamma(z).

    Equal to (g_{n,k}/p_{n-k,k}) P_{n-k,k}^gamma(z); G_{0,0} = 1.
    """
    return (g_leading_coeff(idx) / leading_coeff_p(idx)) * disk_poly(idx.n - idx.k, idx.k, idx.gamma, p)


def G_hat_eval(idx: ZernikeIndex, p):
    """Orthonormal basis element Ghat_{n,k} = (-1)^k P_{n-k,k} / ||P_{n-k,k}||."""
    scale = (-1.0) ** idx.k / math.sqrt(zernike_norm_sq(idx))
    return scale * disk_poly(idx.n - idx.k, idx.k, idx.gamma, p)


def G_fourier_oracle(n: int, k: int, gamma, p, theta_order: int):
    """Independent oracle for G_{n,k}: the (2k-n)-th Fourier coefficient of
    theta -> L_n^gamma((i/2)(zbar e^(i theta) - z e^(-i theta))).

    ``k`` may lie outside [0, n]; the result is then zero up to quadrature
    rounding.  Requires theta_order > 2*max(n, |n-2k|) for exactness.
    """
    g = as_gamma(gamma)
    if theta_order <= 2 * max(n, abs(n - 2 * k)):
        raise ValueError("theta_order too small to resolve the Fourier coefficient")
    z = _as_complex(p)
    z = np.asarray(z, dtype=complex)
    theta = 2.0 * math.pi * np.arange(theta_order) / theta_order
    arg = 0.5j * (np.conj(z)[..., None] * np.exp(1j * theta) - z[..., None] * np.exp(-1j * theta))
    vals = gegenbauer_L(n, g, arg) * np.exp(1j * (n - 2 * k) * theta)
    out = vals.mean(axis=-1)
    return out if out.ndim else complex(out)


class CoefficientField:
    """Truncated expansion of a disk function in the orthonormal basis Ghat.

    Coefficients are stored densely over the lower-triangular lattice
    {(n, k): n <= degree, 0 <= k <= n}; the L^2(d^gamma) norm is the
    Euclidean norm of the coefficient vector.  Treat instances as immutable;
    operators return new fields.
    """

    def __init__(self, gamma, degree: int, coeffs: np.ndarray | None = None):
        self.gamma = as_gamma(gamma)
        if degree < 0:
            raise ValueError("degree must be nonnegative")
        self.degree = int(degree)
        size = (self.degree + 1) * (self.degree + 2) // 2
        if coeffs is None:
            coeffs = np.zeros(size, dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (size,):
            raise ValueError(f"coefficient array must have length {size}, got {coeffs.shape}")
        self.coeffs = coeffs

    @staticmethod
    def position(n: int, k: int) -> int:
        return n * (n + 1) // 2 + k

    @classmethod
    def zeros(cls, gamma, degree: int) -> "CoefficientField":
        return cls(gamma, degree)

    @classmethod
    def delta(cls, gamma, degree: int, n: int, k: int, value: complex = 1.0) -> "CoefficientField":
        f = cls(gamma, degree)
        if not (0 <= k <= n <= degree):
            raise ValueError(f"index ({n}, {k}) outside triangle of degree {degree}")
        f.coeffs[cls.position(n, k)] = value
        return f

    @classmethod
    def random(cls, gamma, degree: int, rng: np.random.Generator) -> "CoefficientField":
        size = (degree + 1) * (degree + 2) // 2
        data = rng.standard_normal(size) + 1j * rng.standard_normal(size)
        return cls(gamma, degree, data)

    def __getitem__(self, nk: tuple[int, int]) -> complex:
        n, k = nk
        if not (0 <= k <= n <= self.degree):
            raise KeyError(f"index ({n}, {k}) outside triangle of degree {self.degree}")
        return complex(self.coeffs[self.position(n, k)])

    def modes(self):
        """Yield (n, k, coefficient) over the triangle."""
        for n in range(self.degree + 1):
            base = n * (n + 1) // 2
            for k in range(n + 1):
                yield n, k, complex(self.coeffs[base + k])

    def norm_sq(self) -> float:
        """Squared L^2(d^gamma) norm, by Parseval."""
        return float(np.vdot(self.coeffs, self.coeffs).real)

    def evaluate(self, p):
        """Pointwise synthesis sum f(z) = sum f_{n,k} Ghat_{n,k}(z)."""
        z = _as_complex(p)
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for n, k, c in self.modes():
            if c != 0.0:
                out += c * G_hat_eval(ZernikeIndex(n, k, self.gamma), z)
        return out if out.ndim else complex(out)


def apply_L_gamma(f: CoefficientField) -> CoefficientField:
    """Diagonal action of the degenerate elliptic operator: f_{n,k} *= (n+1+gamma)^2."""
    out = np.array(f.coeffs)
    for n in range(f.degree + 1):
        base = n * (n + 1) // 2
        out[base : base + n + 1] *= (n + 1.0 + f.gamma) ** 2
    return CoefficientField(f.gamma, f.degree, out)


def apply_D_omega(f: CoefficientField) -> CoefficientField:
    """Diagonal action of the angular derivative: f_{n,k} *= (n - 2k)."""
    out = np.array(f.coeffs)
    for n in range(f.degree + 1):
        base = n * (n + 1) // 2
        out[base : base + n + 1] *= n - 2.0 * np.arange(n + 1)
    return CoefficientField(f.gamma, f.degree, out)


def d_dz(f: CoefficientField) -> CoefficientField:
    """Spectral d/dz: maps the gamma basis into the gamma+1 basis, degree N-1.

    Ladder: d/dz Ghat_{n,k}^g = sqrt((n-k)(k+g+1)) Ghat_{n-1,k}^(g+1).  The
    coefficient follows from the unnormalized derivative relation
    d/dz P_{m,l}^g = m(l+1+g)/(1+g) P_{m-1,l}^(g+1) together with the norm
    table; the (g+1) factors cancel completely (checked against the
    finite-difference oracle in the tests).
    """
    g = f.gamma
    if f.degree == 0:
        return CoefficientField(g + 1.0, 0)
    out = CoefficientField(g + 1.0, f.degree - 1)
    for n, k, c in f.modes():
        if n >= 1 and k <= n - 1 and c != 0.0:
            coef = math.sqrt((n - k) * (k + g + 1.0))
            out.coeffs[out.position(n - 1, k)] += coef * c
    return out


def d_dzbar(f: CoefficientField) -> CoefficientField:
    """Spectral d/dzbar: conjugate ladder into the gamma+1 basis, degree N-1.

    Ladder: d/dzbar Ghat_{n,k}^g = -sqrt((n-k+g+1) k) Ghat_{n-1,k-1}^(g+1),
    by the same cancellation as in d_dz.
    """
    g = f.gamma
    if f.degree == 0:
        return CoefficientField(g + 1.0, 0)
    out = CoefficientField(g + 1.0, f.degree - 1)
    for n, k, c in f.modes():
        if n >= 1 and k >= 1 and c != 0.0:
            coef = -math.sqrt((n - k + g + 1.0) * k)
            out.coeffs[out.position(n - 1, k - 1)] += coef * c
    return out


_D1 = {  # second-order first-derivative stencils, offsets in units of h
    "c": ((-1, 0, 1), (-0.5, 0.0, 0.5)),
    "f": ((0, 1, 2), (-1.5, 2.0, -0.5)),
    "b": ((-2, -1, 0), (0.5, -2.0, 1.5)),
}
_D2 = {  # second-order second-derivative stencils
    "c": ((-1, 0, 1), (1.0, -2.0, 1.0)),
    "f": ((0, 1, 2, 3), (2.0, -5.0, 4.0, -1.0)),
    "b": ((-3, -2, -1, 0), (-1.0, 4.0, -5.0, 2.0)),
}


def _fd_mode(coord: float, other: float, h: float) -> str:
    """Pick central/forward/backward so the full stencil stays in the disk."""
    span = 3.0 * h
    if (abs(coord) + span) ** 2 + other * other <= 1.0:
        return "c"
    return "f" if coord < 0 else "b"


def _fd_derivatives(func, x: float, y: float, h: float):
    """(fx, fy, fxx, fyy, fxy) by tensor-product finite differences."""
    mx = _fd_mode(x, y, h)
    my = _fd_mode(y, x, h)
    ox1, wx1 = _D1[mx]
    ox2, wx2 = _D2[mx]
    oy1, wy1 = _D1[my]
    oy2, wy2 = _D2[my]
    offs_x = sorted(set(ox1) | set(ox2))
    offs_y = sorted(set(oy1) | set(oy2))
    grid = {
        (i, j): func(complex(x + i * h, y + j * h))
        for i in offs_x
        for j in offs_y
    }
    fx = sum(w * grid[(i, 0)] for i, w in zip(ox1, wx1)) / h
    fy = sum(w * grid[(0, j)] for j, w in zip(oy1, wy1)) / h
    fxx = sum(w * grid[(i, 0)] for i, w in zip(ox2, wx2)) / (h * h)
    fyy = sum(w * grid[(0, j)] for j, w in zip(oy2, wy2)) / (h * h)
    fxy = sum(
        wx * wy * grid[(i, j)] for i, wx in zip(ox1, wx1) for j, wy in zip(oy1, wy1)
    ) / (h * h)
    return fx, fy, fxx, fyy, fxy


def L_gamma_pointwise(func, gamma, p, h: float = 1e-4, richardson: bool = True):
    """Apply the disk operator to a pointwise-evaluable function at one point.

    Cartesian form (equivalent to the polar one, regular at rho = 0):

        -(1-rho^2) Lap f + (2+2*gamma)(x fx + y fy) - Dw^2 f + (gamma+1)^2 f,

    with Dw = x d/dy - y d/dx the angular derivative.  Uses second-order
    finite differences (Richardson-extrapolated by default); stencils switch
    to one-sided within 3h of the boundary, with reduced accuracy.
    """
    g = as_gamma(gamma)
    z = _as_complex(p)
    x, y = float(np.real(z)), float(np.imag(z))

    def combine(step: float):
        fx, fy, fxx, fyy, fxy = _fd_derivatives(func, x, y, step)
        rho2 = x * x + y * y
        lap = fxx + fyy
        radial = x * fx + y * fy
        dw2 = x * x * fyy + y * y * fxx - 2.0 * x * y * fxy - radial
        return -(1.0 - rho2) * lap + (2.0 + 2.0 * g) * radial - dw2

    f0 = func(complex(x, y))
    if richardson:
        second = (4.0 * combine(h / 2.0) - combine(h)) / 3.0
    else:
        second = combine(h)
    return second + (g + 1.0) ** 2 * f0


def write_coefficients(path, f: CoefficientField) -> None:
    """Write a coefficient field as text: gamma/degree header, then n,k,re,im rows."""
    lines = [f"gamma={f.gamma:.17g}", f"degree={f.degree}"]
    for n, k, c in f.modes():
        lines.append(f"{n},{k},{c.real:.17g},{c.imag:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_coefficients(path) -> CoefficientField:
    """Parse a coefficient file; rejects indices violating 0 <= k <= n."""
    header = {}
    entries = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" in line:
                key, _, val = line.partition("=")
                header[key.strip()] = val.strip()
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 'n,k,re,im', got {line!r}")
            try:
                n, k = int(parts[0]), int(parts[1])
                re, im = float(parts[2]), float(parts[3])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            if not (0 <= k <= n):
                raise ValueError(f"{path}:{lineno}: index ({n}, {k}) violates 0 <= k <= n")
            entries.append((n, k, complex(re, im), lineno))
    if "gamma" not in header or "degree" not in header:
        raise ValueError(f"{path}: missing gamma/degree header")
    gamma = float(header["gamma"])
    degree = int(header["degree"])
    f = CoefficientField(gamma, degree)
    for n, k, c, lineno in entries:
        if n > degree:
            raise ValueError(f"{path}:{lineno}: degree {n} exceeds declared degree {degree}")
        f.coeffs[f.position(n, k)] = c
    return f
