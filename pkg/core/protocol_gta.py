"""
SwarmWave epsilon-Go-To-The-Average

Each robot moves an epsilon-fraction of its bump-weighted displacement towards
every visible robot:

    z_i+ = z_i + (eps / n) * sum_j b(||z_i - z_j||^2) (z_j - z_i)

with b(X) = exp(-X^2 / (1 - X^2)) for X < 1 and 0 otherwise. The module also
provides the analytic Jacobian of the full round, its Gershgorin
certificate of invertibility, and a Newton inverter for the observer.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.spatial import cKDTree

from core.errors import InversionError, ProtocolError
from core.geometry import Configuration

# Configure logging
logger = logging.getLogger(__name__)

# Share of the certification bound used when no epsilon is given
DEFAULT_EPSILON_SHARE = 0.9


def gta_epsilon_bound(n: int) -> float:
    """Exclusive epsilon threshold n / (27 (n - 1)) below which every Jacobian certifies"""
    if n < 2:
        raise ProtocolError(f"epsilon bound is undefined for n={n} (a single robot never moves)")
    return n / (27.0 * (n - 1))


@dataclass
class GtaParams:
    epsilon: float
    n: int
    viewing_range: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ProtocolError(f"gta epsilon must lie in (0, 1), got {self.epsilon}")
        if self.n < 1:
            raise ProtocolError(f"robot count must be positive, got {self.n}")
        if self.viewing_range <= 0:
            raise ProtocolError(f"viewing range must be positive, got {self.viewing_range}")
        if not self.certified_regime:
            logger.warning(
                f"epsilon={self.epsilon} is not below n/(27(n-1)) for n={self.n}; "
                f"invertibility is not guaranteed"
            )

    @property
    def certified_regime(self) -> bool:
        return self.n < 2 or self.epsilon < gta_epsilon_bound(self.n)

    @classmethod
    def default(cls, n: int, viewing_range: float = 1.0) -> "GtaParams":
        epsilon = DEFAULT_EPSILON_SHARE * gta_epsilon_bound(n) if n >= 2 else 0.5
        return cls(epsilon=epsilon, n=n, viewing_range=viewing_range)


@dataclass
class JacobianMatrix:
    """Dense 2n x 2n Jacobian; coordinates ordered x_1, y_1, x_2, y_2, ..."""

    entries: np.ndarray

    @property
    def n(self) -> int:
        return self.entries.shape[0] // 2

    def block(self, i: int, j: int) -> np.ndarray:
        return self.entries[2 * i:2 * i + 2, 2 * j:2 * j + 2]


@dataclass
class GershgorinCertificate:
    centers: np.ndarray
    radii: np.ndarray
    certified: bool

    @property
    def margin(self) -> float:
        """Smallest |center| - radius over all rows; positive iff certified"""
        return float(np.min(np.abs(self.centers) - self.radii))


def _check_non_negative(X: np.ndarray):
    if np.any(X < 0):
        raise ProtocolError("bump function is defined for squared distances X >= 0")


def bump(X: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """exp(-X^2 / (1 - X^2)) on [0, 1), 0 from X = 1 on"""
    values = np.asarray(X, dtype=float)
    _check_non_negative(values)
    out = np.zeros_like(values)
    inside = values < 1.0
    sq = values[inside] ** 2
    out[inside] = np.exp(-sq / (1.0 - sq))
    return float(out) if out.ndim == 0 else out


def gta_bump_derivative(X: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """b'(X) = b(X) * (-2X / (1 - X^2)^2); both sides of the X = 1 junction are 0"""
    values = np.asarray(X, dtype=float)
    _check_non_negative(values)
    out = np.zeros_like(values)
    inside = values < 1.0
    x = values[inside]
    sq = x * x
    out[inside] = np.exp(-sq / (1.0 - sq)) * (-2.0 * x / (1.0 - sq) ** 2)
    return float(out) if out.ndim == 0 else out


def _params_for(config: Configuration, params: Optional[GtaParams]) -> GtaParams:
    if params is None:
        return GtaParams.default(config.n)
    if params.n != config.n:
        raise ProtocolError(f"parameters are for {params.n} robots, configuration has {config.n}")
    return params


def gta_target(i: int, config: Configuration, viewing_range: float = 1.0) -> np.ndarray:
    """T(z_i; z) = (1/n) sum_j b(||z_i - z_j||^2) (z_j - z_i), summed exactly with math.fsum"""
    if not 0 <= i < config.n:
        raise ProtocolError(f"robot index {i} out of range for {config.n} robots")
    pts = config.positions
    delta = pts - pts[i]
    X = np.sum(delta * delta, axis=1) / viewing_range ** 2
    weights = bump(np.atleast_1d(X))
    contrib = weights[:, None] * delta
    sums = np.array([math.fsum(contrib[:, 0]), math.fsum(contrib[:, 1])])
    return sums / config.n


def _displacements(config: Configuration, viewing_range: float) -> np.ndarray:
    """All T(z_i; z) at once, pruned to pairs within the viewing range"""
    pts = config.positions
    n = config.n
    sums = np.zeros((n, 2))
    if n < 2:
        return sums
    pairs = cKDTree(pts).query_pairs(viewing_range, output_type="ndarray")
    if pairs.shape[0] == 0:
        return sums
    first, second = pairs[:, 0], pairs[:, 1]
    delta = pts[second] - pts[first]
    weights = bump(np.sum(delta * delta, axis=1) / viewing_range ** 2)
    contrib = weights[:, None] * delta
    owners = np.concatenate([first, second])
    terms = np.concatenate([contrib, -contrib])
    order = np.argsort(owners, kind="stable")
    owners, terms = owners[order], terms[order]
    bounds = np.searchsorted(owners, np.arange(n + 1))
    for i in range(n):
        lo, hi = bounds[i], bounds[i + 1]
        if lo == hi:
            continue
        sums[i, 0] = math.fsum(terms[lo:hi, 0])
        sums[i, 1] = math.fsum(terms[lo:hi, 1])
    return sums / n


def gta_step(config: Configuration, params: Optional[GtaParams] = None) -> Configuration:
    """One FSYNC round: every target is computed from the input configuration"""
    params = _params_for(config, params)
    moves = _displacements(config, params.viewing_range)
    return config.with_positions(config.positions + params.epsilon * moves)


def gta_jacobian(config: Configuration, params: Optional[GtaParams] = None) -> JacobianMatrix:
    """
    Analytic Jacobian of the full round. For j != i, with (dx, dy) = z_i - z_j:

        dF_i/dz_j = (eps/n) [[2b' dx^2 + b, 2b' dx dy], [2b' dx dy, 2b' dy^2 + b]]

    and the diagonal block is I minus the sum of the off-diagonal blocks of the row.
    """
    params = _params_for(config, params)
    pts = config.positions
    n = config.n
    scale = 1.0 / params.viewing_range ** 2
    delta = pts[:, None, :] - pts[None, :, :]
    X = np.sum(delta * delta, axis=-1) * scale
    b = bump(X)
    bp = gta_bump_derivative(X) * scale
    np.fill_diagonal(b, 0.0)
    np.fill_diagonal(bp, 0.0)
    dx, dy = delta[..., 0], delta[..., 1]
    factor = params.epsilon / n
    blocks = np.empty((n, n, 2, 2))
    blocks[..., 0, 0] = factor * (2.0 * bp * dx * dx + b)
    blocks[..., 0, 1] = factor * (2.0 * bp * dx * dy)
    blocks[..., 1, 0] = blocks[..., 0, 1]
    blocks[..., 1, 1] = factor * (2.0 * bp * dy * dy + b)
    diagonal = np.eye(2)[None, :, :] - blocks.sum(axis=1)
    blocks[np.arange(n), np.arange(n)] = diagonal
    entries = blocks.transpose(0, 2, 1, 3).reshape(2 * n, 2 * n)
    return JacobianMatrix(entries)


def gershgorin_certify(jac: Union[JacobianMatrix, np.ndarray]) -> GershgorinCertificate:
    """Certified iff every Gershgorin disc excludes 0, i.e. radius < |center| in every row"""
    matrix = jac.entries if isinstance(jac, JacobianMatrix) else np.asarray(jac, dtype=float)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ProtocolError(f"Gershgorin certificate needs a square matrix, got {matrix.shape}")
    centers = np.diag(matrix).copy()
    radii = np.sum(np.abs(matrix), axis=1) - np.abs(centers)
    certified = bool(np.all(radii < np.abs(centers)))
    return GershgorinCertificate(centers=centers, radii=radii, certified=certified)


def gta_invert(next_config: Configuration, params: Optional[GtaParams] = None,
               guess: Optional[Configuration] = None, tol: float = 1e-13,
               max_iterations: int = 50) -> Configuration:
    """Solve F(w) = z+ for w by Newton iteration with the analytic Jacobian"""
    params = _params_for(next_config, params)
    target = next_config.positions.reshape(-1)
    w = (guess if guess is not None else next_config).positions.reshape(-1).copy()
    for iteration in range(max_iterations):
        current = Configuration(w.reshape(-1, 2))
        residual = gta_step(current, params).positions.reshape(-1) - target
        if np.max(np.abs(residual)) <= tol:
            return current
        update = np.linalg.solve(gta_jacobian(current, params).entries, -residual)
        w = w + update
        floor = 4.0 * np.finfo(float).eps * max(1.0, float(np.max(np.abs(w))))
        if np.max(np.abs(update)) <= floor:
            logger.debug(f"gta_invert stalled at round-off after {iteration + 1} iterations")
            return Configuration(w.reshape(-1, 2))
    raise InversionError(f"Newton inversion did not converge in {max_iterations} iterations")
