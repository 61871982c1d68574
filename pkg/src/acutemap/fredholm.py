"""Truncated Fourier system for the boundary correspondence.

The derivative of the sought periodic correction is expanded in M cosine and
M sine harmonics (no constant: the correction is periodic, and the forcing
has zero mean). Projecting the second-kind integral equation onto the same
harmonics gives a dense 2M x 2M system whose double-integral entries are
read off a single 2D FFT of the sampled kernel grid.
"""

from dataclasses import dataclass

import numpy as np

from .boundary import TWO_PI
from .errors import ConfigError, InvariantError, NumericalError
from .kernels import KernelGrid, kernel_grid

COND_LIMIT = 1e12


@dataclass(frozen=True)
class AssembledSystem:
    """Dense truncated system plus the kernel grid it was built from."""

    M: int
    matrix: np.ndarray
    rhs: np.ndarray
    grid: KernelGrid


@dataclass(frozen=True)
class FredholmSolution:
    """Harmonics of the correction derivative and the achieved grid residual."""

    M: int
    alpha: np.ndarray
    beta: np.ndarray
    residual_norm: float

    def to_dict(self):
        return {
            "M": int(self.M),
            "alpha": [float(v) for v in self.alpha],
            "beta": [float(v) for v in self.beta],
            "residual": float(self.residual_norm),
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                M=int(data["M"]),
                alpha=np.asarray(data["alpha"], dtype=float),
                beta=np.asarray(data["beta"], dtype=float),
                residual_norm=float(data["residual"]),
            )
        except (TypeError, KeyError, ValueError) as exc:
            raise ConfigError(f"malformed solution file: {exc}") from exc


def assemble(boundary, M, size):
    """Assemble the truncated system from one kernel grid of the given size.

    The grid must resolve both the harmonics and the curve:
    size >= max(2*(2M+1), 4*(m+n)), and a power of two for the FFT steps.
    Entry (j, k) of each block is a double trapezoid of the kernel against
    (cos or sin)(k tau) and (cos or sin)(j t); on the uniform product grid
    those sums are exactly Fourier coefficients of the sampled kernel, so
    all four blocks come from one 2D FFT.
    """
    if M < 1:
        raise ConfigError(f"harmonic count must be positive, got {M}")
    low = max(2 * (2 * M + 1), 4 * (boundary.m + boundary.n))
    if size < low:
        raise ConfigError(f"grid size {size} below the resolution bound {low}")
    grid = kernel_grid(boundary, size)
    spec2 = np.fft.fft2(grid.matrix) / size**2
    pos = spec2[1 : M + 1, 1 : M + 1]
    neg = spec2[1 : M + 1, size - 1 : size - M - 1 : -1]
    re_p = pos.real.T
    im_p = pos.imag.T
    re_n = neg.real.T
    im_n = neg.imag.T
    eye = np.eye(M)
    block_a = eye - 2.0 * (re_p + re_n)
    block_b = 2.0 * (im_p + im_n)
    block_c = 2.0 * (im_p - im_n)
    block_d = eye + 2.0 * (re_p - re_n)
    matrix = np.block([[block_a, block_b], [block_c, block_d]])
    spec1 = np.fft.fft(grid.forcing) / size
    rhs = np.concatenate([2.0 * spec1[1 : M + 1].real, -2.0 * spec1[1 : M + 1].imag])
    return AssembledSystem(M=M, matrix=matrix, rhs=rhs, grid=grid)


def solve(system):
    """Solve the assembled system and record the collocation residual.

    The residual is the max-norm defect of the original integral equation at
    the grid nodes, evaluated with the already-sampled kernel. Raises
    NumericalError when the matrix condition estimate exceeds 1e12.
    """
    cond = np.linalg.cond(system.matrix)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalError(
            f"truncated system is numerically singular (cond {cond:.3e}); "
            f"M={system.M} likely over-resolves the kernel"
        )
    x = np.linalg.solve(system.matrix, system.rhs)
    alpha = x[: system.M].copy()
    beta = x[system.M :].copy()
    nodes = system.grid.nodes
    ell = np.arange(1, system.M + 1)
    lt = nodes[:, None] * ell
    qp = np.cos(lt) @ alpha + np.sin(lt) @ beta
    size = nodes.size
    defect = qp - (2.0 / size) * (qp @ system.grid.matrix) - system.grid.forcing
    return FredholmSolution(
        M=system.M,
        alpha=alpha,
        beta=beta,
        residual_norm=float(np.max(np.abs(defect))),
    )


class RawCorrespondence:
    """Boundary correspondence theta(t) before any corner correction.

    theta(t) is the unwrapped polar angle of z(t) minus the reconstructed
    periodic correction (integrated harmonics, zero constant). It gains
    exactly 2*pi per period; near an acute corner it may fail to be
    monotone, which the corrector module repairs.
    """

    kind = "raw"

    def __init__(self, boundary, solution, dense=8192):
        self.boundary = boundary
        self.solution = solution
        self._ell = np.arange(1, solution.M + 1, dtype=float)
        tg = np.linspace(0.0, TWO_PI, dense + 1)
        angles = np.unwrap(np.angle(boundary(tg)))
        if abs((angles[-1] - angles[0]) - TWO_PI) > 1e-6:
            raise InvariantError(
                "polar angle of the boundary does not gain 2*pi per period"
            )
        self._eta_nodes = tg
        self._eta = angles - tg

    def _offset(self, t):
        lt = np.multiply.outer(t, self._ell)
        return np.sin(lt) @ (self.solution.alpha / self._ell) - np.cos(lt) @ (
            self.solution.beta / self._ell
        )

    def _offset_prime(self, t):
        lt = np.multiply.outer(t, self._ell)
        return np.cos(lt) @ self.solution.alpha + np.sin(lt) @ self.solution.beta

    def arg_unwrapped(self, t):
        """Continuous polar angle of z(t), anchored to the principal value at 0."""
        t = np.asarray(t, dtype=float)
        tm = np.mod(t, TWO_PI)
        principal = np.angle(self.boundary(tm))
        reference = np.interp(tm, self._eta_nodes, self._eta)
        branch = np.round((tm + reference - principal) / TWO_PI)
        return principal + TWO_PI * branch + (t - tm)

    def theta(self, t):
        out = self.arg_unwrapped(t) - self._offset(np.asarray(t, dtype=float))
        return float(out) if np.ndim(out) == 0 else out

    def theta_prime(self, t):
        t = np.asarray(t, dtype=float)
        ratio = self.boundary.derivative(t) / self.boundary(t)
        out = ratio.imag - self._offset_prime(t)
        return float(out) if np.ndim(out) == 0 else out


def solve_correspondence(boundary, M, size):
    """Assemble, solve, and wrap the result as a RawCorrespondence."""
    return RawCorrespondence(boundary, solve(assemble(boundary, M, size)))
