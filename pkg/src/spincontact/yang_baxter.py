"""Exchange operators and numerical Yang-Baxter residuals.

Crossing the coincidence hyperplane of adjacent particles multiplies the
plane-wave coefficient vector by the exchange operator

    Y(k) = (2ik - h_{mr})^{-1} (2ik P^{mr} + h_{mr})

acting on the full n^N space, where k = (k_a - k_b)/2 is half the momentum
difference of the exchanged pair, h_{mr} the embedded coupling, and P^{mr}
the signed pair exchange.  Index convention used throughout: a momentum
subscript pair (a, b) on Y means k = (k_a - k_b)/2 directly.

Y acts as -1 on the pair subspace where P = -1 and as the Cayley-type phase
(2ik + h)/(2ik - h) where P = +1; it is unitary for real momenta whenever
[h, p] = 0.  The spectral Yang-Baxter identity

    Y^{m,m+1}_{ij} Y^{m+1,m+2}_{kj} Y^{m,m+1}_{ki}
        = Y^{m+1,m+2}_{ki} Y^{m,m+1}_{kj} Y^{m+1,m+2}_{ij}

is exactly the path-independence condition of coefficient propagation.
Commuting with the swap is necessary for it; sufficiency additionally
requires h to act as a scalar on the P = +1 pair subspace (automatic for
spin-1/2 fermions, where that subspace is one-dimensional).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import SingularExchangeError, ValidationError
from .models import CouplingMatrix, swap_matrix
from .tensor_algebra import SpinConfig, Statistics, embed_two_site

EIGEN_COLLISION_TOL = 1e-10


@dataclass(frozen=True)
class MomentumSet:
    """Wavenumbers of the N particles; complex entries cover bound states."""

    k: Tuple[complex, ...]

    def __init__(self, k):
        vals = tuple(complex(v) for v in k)
        if len(vals) < 1:
            raise ValidationError("momentum set must contain at least one entry")
        for v in vals:
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValidationError(f"momentum {v} is not finite")
        object.__setattr__(self, "k", vals)

    def __len__(self) -> int:
        return len(self.k)

    def __getitem__(self, idx: int) -> complex:
        return self.k[idx]


def pair_momentum(ks: MomentumSet, i: int, j: int) -> complex:
    """Half the momentum difference (k_i - k_j)/2 of particles i and j (1-based)."""
    for idx in (i, j):
        if not 1 <= idx <= len(ks):
            raise ValidationError(f"momentum index {idx} outside [1, {len(ks)}]")
    return (ks[i - 1] - ks[j - 1]) / 2


@dataclass(frozen=True)
class YOperator:
    """Exchange operator on the full n^N space with its construction metadata."""

    matrix: np.ndarray
    sites: Tuple[int, int]
    momentum_pair: Tuple[int, int]


def _check_collision(eigs: np.ndarray, z: complex, what: str) -> None:
    gaps = np.abs(eigs - z)
    pos = int(np.argmin(gaps))
    if gaps[pos] < EIGEN_COLLISION_TOL:
        raise SingularExchangeError(
            f"2i*k = {z:.6g} collides with eigenvalue {eigs[pos]:.6g} of {what}; "
            "the exchange operator is singular at this momentum",
            collision=complex(eigs[pos]),
        )


def pair_exchange_matrix(h: CouplingMatrix, k: complex,
                         statistics: Statistics) -> np.ndarray:
    """The n^2 x n^2 building block (2ik - h)^{-1} (2ik P + h) in pair space."""
    z = 2j * complex(k)
    eigs = np.linalg.eigvalsh(h.entries)
    _check_collision(eigs, z, "the coupling")
    p = statistics.sign * swap_matrix(h.n)
    eye = np.eye(h.dim)
    return np.linalg.solve(z * eye - h.entries, z * p + h.entries)


def y_operator(cfg: SpinConfig, h: CouplingMatrix, ks: MomentumSet,
               momentum_pair: Tuple[int, int],
               sites: Tuple[int, int]) -> YOperator:
    """Exchange operator for momentum pair (i, j) acting on sites (m, r).

    The momentum pair is ordered (k = (k_i - k_j)/2 flips sign with it); the
    site pair is normalized to (min, max) since both P and admissible h are
    swap symmetric.
    """
    if h.n != cfg.n:
        raise ValidationError(f"coupling is for n = {h.n}, config has n = {cfg.n}")
    if len(ks) != cfg.N:
        raise ValidationError(f"{len(ks)} momenta for N = {cfg.N} particles")
    k = pair_momentum(ks, *momentum_pair)
    pair = pair_exchange_matrix(h, k, cfg.statistics)
    m, r = sites
    return YOperator(
        matrix=embed_two_site(cfg, pair, m, r),
        sites=(min(m, r), max(m, r)),
        momentum_pair=tuple(momentum_pair),
    )


def _y_from_value(cfg, h, k, sites) -> np.ndarray:
    pair = pair_exchange_matrix(h, k, cfg.statistics)
    return embed_two_site(cfg, pair, *sites)


def ybe_residual(cfg: SpinConfig, h: CouplingMatrix,
                 k_triple: Sequence[complex], base_site: int = 1) -> float:
    """Max-norm spectral Yang-Baxter residual for one momentum triple.

    Builds the six exchange operators on the adjacent site triple
    (m, m+1, m+2) starting at base_site and returns || LHS - RHS ||_max of
    the braid identity.  Zero (to rounding) iff coefficient propagation is
    path independent for these momenta.
    """
    if cfg.N < 3:
        raise ValidationError("the triple relation needs N >= 3")
    m = base_site
    if not 1 <= m <= cfg.N - 2:
        raise ValidationError(f"base site {m} leaves no room for sites (m+1, m+2)")
    ki, kj, kk = (complex(v) for v in k_triple)

    def y(sites, ka, kb):
        return _y_from_value(cfg, h, (ka - kb) / 2, sites)

    lo, hi = (m, m + 1), (m + 1, m + 2)
    lhs = y(lo, ki, kj) @ y(hi, kk, kj) @ y(lo, kk, ki)
    rhs = y(hi, kk, ki) @ y(lo, kk, kj) @ y(hi, ki, kj)
    return float(np.max(np.abs(lhs - rhs)))


def ybe_disjoint_residual(cfg: SpinConfig, h: CouplingMatrix, ks: MomentumSet,
                          site_pairs: Tuple[Tuple[int, int], Tuple[int, int]],
                          momentum_pairs: Tuple[Tuple[int, int], Tuple[int, int]] = ((1, 2), (3, 4)),
                          ) -> float:
    """Commutator max norm of two exchange operators on disjoint site pairs."""
    (m, r), (s, q) = site_pairs
    if len({m, r, s, q}) != 4:
        raise ValidationError(f"site pairs {site_pairs} overlap; all four must differ")
    if cfg.N < 4:
        raise ValidationError("disjoint site pairs need N >= 4")
    y1 = y_operator(cfg, h, ks, momentum_pairs[0], (m, r)).matrix
    y2 = y_operator(cfg, h, ks, momentum_pairs[1], (s, q)).matrix
    return float(np.max(np.abs(y1 @ y2 - y2 @ y1)))


def separated_y(cfg: SpinConfig, G, k: complex,
                sites: Tuple[int, int]) -> YOperator:
    """Exchange operator of the separated family: (ik - G)^{-1} (ik + G).

    G is Hermitian on the pair space; the two factors commute, so factor
    order is immaterial, and the result is unitary for real k.
    """
    arr = np.asarray(G, dtype=complex)
    d = cfg.n * cfg.n
    if arr.shape != (d, d):
        raise ValidationError(f"G must be {d} x {d}, got {arr.shape}")
    resid = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
    if resid > 1e-12:
        raise ValidationError(f"G is not Hermitian (deviation {resid:.3e})")
    z = 1j * complex(k)
    eigs = np.linalg.eigvalsh(arr)
    _check_collision(eigs, z, "G")
    eye = np.eye(d)
    pair = np.linalg.solve(z * eye - arr, z * eye + arr)
    return YOperator(
        matrix=embed_two_site(cfg, pair, *sites),
        sites=(min(sites), max(sites)),
        momentum_pair=(0, 0),
    )


def constant_ybe_residual(R, n: int) -> float:
    """Residual of the parameter-free braid relation R12 R13 R23 = R23 R13 R12.

    R is an n^2 x n^2 matrix embedded pairwise into the threefold tensor
    space.  The swap satisfies this exactly; a generic swap-commuting
    coupling does not, even when its spectral relations close.
    """
    arr = np.asarray(R, dtype=complex)
    if arr.shape != (n * n, n * n):
        raise ValidationError(f"R must be {n * n} x {n * n}, got {arr.shape}")
    cfg = SpinConfig(N=3, n=n, dim_cap=max(4096, n**3))
    r12 = embed_two_site(cfg, arr, 1, 2)
    r13 = embed_two_site(cfg, arr, 1, 3)
    r23 = embed_two_site(cfg, arr, 2, 3)
    lhs = r12 @ r13 @ r23
    rhs = r23 @ r13 @ r12
    return float(np.max(np.abs(lhs - rhs)))
