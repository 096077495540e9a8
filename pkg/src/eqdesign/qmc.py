"""Randomized Sobol' sequences and quasi-Monte Carlo MLE sampling.

The generator uses 32-bit direction numbers (Joe-Kuo style primitive
polynomials and initial values, dimensions up to 10) with Gray-code
ordering, randomized by a per-dimension digital shift (XOR mask) derived
deterministically from the seed.  Everything is integer arithmetic until
the final division, so streams are bit-identical across platforms.

``mle_limit_draw`` maps one Sobol point to a draw from the joint
large-sample distribution of the two groups' MLEs on the transformed
parameter scale, back-transformed into the natural parameter space.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import CapabilityError, DegeneracyError, DomainError

__all__ = ["SobolStream", "sobol_points", "MleLimitDraw", "mle_limit_draw", "split_seed"]

_BITS = 32
_SCALE = float(2**_BITS)
_MASK64 = (1 << 64) - 1

# Primitive polynomial degree s, coefficient bits a, and initial direction
# values m_1..m_s for dimensions 2..10 (dimension 1 is van der Corput base 2).
_DIRECTION_TABLE = [
    (1, 0, [1]),
    (2, 1, [1, 3]),
    (3, 1, [1, 3, 1]),
    (3, 2, [1, 1, 1]),
    (4, 1, [1, 1, 3, 3]),
    (4, 4, [1, 3, 5, 13]),
    (5, 2, [1, 1, 5, 5, 17]),
    (5, 4, [1, 1, 5, 5, 5]),
    (5, 7, [1, 1, 7, 11, 19]),
]

MAX_DIMENSION = len(_DIRECTION_TABLE) + 1

# Clamp randomized coordinates away from 0 before any normal-quantile map;
# keeps determinism while avoiding infinities when a shift lands on 0.
COORD_EPS = 2.0 ** (-43)


def splitmix64(state):
    """One splitmix64 step; returns (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def split_seed(seed, count):
    """Expand one user seed into ``count`` decorrelated 64-bit sub-seeds."""
    state = int(seed) & _MASK64
    out = []
    for _ in range(count):
        state, val = splitmix64(state)
        out.append(val)
    return out


def _direction_vectors(dim_index, nbits=_BITS):
    """Direction integers V_1..V_nbits for one dimension (1-based index)."""
    if dim_index == 1:
        return [1 << (nbits - k) for k in range(1, nbits + 1)]
    s, a, m_init = _DIRECTION_TABLE[dim_index - 2]
    m = list(m_init)
    for k in range(s, nbits):
        new = m[k - s] ^ (m[k - s] << s)
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                new ^= m[k - i] << i
        m.append(new)
    return [m[k] << (nbits - k - 1) for k in range(nbits)]


@dataclass(frozen=True)
class SobolStream:
    """Digitally shifted Sobol' stream of a fixed dimension.

    With ``seed=None`` the stream is the unrandomized base sequence.
    Points are emitted in Gray-code order; the set of the first 2^m
    points equals the natural-order prefix.
    """

    dimension: int
    seed: int | None = None

    def __post_init__(self):
        if self.dimension < 1:
            raise DomainError("Sobol dimension must be >= 1")
        if self.dimension > MAX_DIMENSION:
            raise CapabilityError(
                f"Sobol dimension {self.dimension} beyond the direction-number table "
                f"(max {MAX_DIMENSION})"
            )
        directions = np.array(
            [_direction_vectors(j) for j in range(1, self.dimension + 1)],
            dtype=np.uint64,
        )
        object.__setattr__(self, "_directions", directions)
        if self.seed is None:
            shift = np.zeros(self.dimension, dtype=np.uint64)
        else:
            shift = np.array(
                [v & (2**_BITS - 1) for v in split_seed(self.seed, self.dimension)],
                dtype=np.uint64,
            )
        object.__setattr__(self, "shift", shift)

    def points(self, count):
        """First ``count`` points as a (count, dimension) array in [0, 1)."""
        if count < 1:
            raise DomainError("point count must be >= 1")
        out = np.empty((count, self.dimension), dtype=np.uint64)
        state = np.zeros(self.dimension, dtype=np.uint64)
        out[0] = state
        for i in range(1, count):
            c = (i & -i).bit_length() - 1  # lowest set bit of i
            state = state ^ self._directions[:, c]
            out[i] = state
        pts = ((out ^ self.shift) / _SCALE).astype(float)
        return pts

    def point(self, index):
        """Point at a given index (0-based), identical to points(index+1)[-1]."""
        state = np.zeros(self.dimension, dtype=np.uint64)
        gray = np.uint64(index ^ (index >> 1))
        for bit in range(int(gray).bit_length()):
            if (int(gray) >> bit) & 1:
                state = state ^ self._directions[:, bit]
        return ((state ^ self.shift) / _SCALE).astype(float)


def sobol_points(dimension, count, seed=None):
    """First ``count`` digitally shifted Sobol points; deterministic in seed."""
    return SobolStream(dimension, seed).points(count)


@dataclass(frozen=True)
class MleLimitDraw:
    """One draw from the joint limiting distribution of the group MLEs."""

    eta1_hat: np.ndarray
    eta2_hat: np.ndarray
    source_point: int = -1


def transformed_mle_covariance(family, eta):
    """Delta-method covariance of T(eta_hat): J I(eta)^-1 J with J = diag(dT/deta)."""
    info = family.fisher_information(np.asarray(eta, dtype=float))
    jac = family.transform_jacobian_diag(np.asarray(eta, dtype=float))
    try:
        inv = np.linalg.inv(info)
    except np.linalg.LinAlgError as exc:
        raise DegeneracyError(f"singular Fisher information at eta={eta!r}") from exc
    return jac[:, None] * inv * jac[None, :]


class LimitDrawContext:
    """Precomputed pieces for repeated MLE limit draws from one design.

    Holds T(eta_j0) and the Cholesky factors of the transformed-scale
    covariances, so per-draw work is two matrix-vector products and an
    inverse transform.
    """

    def __init__(self, design):
        self.design = design
        fam = design.family
        self.t1 = fam.transform(design.eta1_array)
        self.t2 = fam.transform(design.eta2_array)
        try:
            self.chol1 = np.linalg.cholesky(
                transformed_mle_covariance(fam, design.eta1_array)
            )
            self.chol2 = np.linalg.cholesky(
                transformed_mle_covariance(fam, design.eta2_array)
            )
        except np.linalg.LinAlgError as exc:
            raise DegeneracyError("transformed MLE covariance is not positive definite") from exc

    def normals(self, u):
        """Map one Sobol point in (0,1)^{2d} to standard-normal coordinates."""
        u = np.clip(np.asarray(u, dtype=float), COORD_EPS, 1.0 - COORD_EPS)
        return special.ndtri(u)

    def transformed_draw(self, n1, n2, z):
        """Transformed-scale MLE draw at per-group effective sizes n1, n2."""
        d = self.design.d
        tt1 = self.t1 + (self.chol1 @ z[:d]) / np.sqrt(n1)
        tt2 = self.t2 + (self.chol2 @ z[d:]) / np.sqrt(n2)
        return tt1, tt2

    def draw(self, n1, n2, z, index=-1):
        tt1, tt2 = self.transformed_draw(n1, n2, z)
        fam = self.design.family
        return MleLimitDraw(
            eta1_hat=fam.inverse_transform(tt1),
            eta2_hat=fam.inverse_transform(tt2),
            source_point=index,
        )


def mle_limit_draw(design, n, u, n2=None):
    """Draw from the joint limiting distribution of the two groups' MLEs.

    Group 1 uses effective size ``n``; group 2 uses ``n2`` when given and
    ``q * n`` otherwise (the allocation-scaled covariance).  The groups
    are independent, so the joint covariance is block diagonal and the
    sequential-conditional construction reduces to two independent
    Cholesky maps.
    """
    if not (np.isfinite(n) and n > 0.0):
        raise DomainError("effective sample size n must be positive")
    u = np.asarray(u, dtype=float)
    if u.shape != (2 * design.d,):
        raise DomainError(f"Sobol point must have dimension {2 * design.d}")
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise DomainError("Sobol point must lie strictly inside (0, 1)^dim")
    ctx = LimitDrawContext(design)
    z = ctx.normals(u)
    return ctx.draw(n, design.q * n if n2 is None else n2, z)
