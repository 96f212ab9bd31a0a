"""Multi-index bookkeeping and operators on the n^N spin space.

A system of N particles, each carrying an n-dimensional spin, lives on the
tensor product space of dimension n^N.  Spin multi-indices (a_1, ..., a_N)
with a_j in [1, n] are flattened row-major with particle 1 as the most
significant digit:

    flat = sum_j (a_j - 1) * n^(N - j)

so the basis order is (1,1,...,1), (1,1,...,2), ..., (n,n,...,n).  Every
matrix in the package uses this ordering, including the n^2 x n^2 pair-space
matrices (N = 2 case of the same rule).

All functions here are pure; returned arrays are freshly allocated.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple

import numpy as np

from .errors import ValidationError

DEFAULT_DIM_CAP = 4096

MultiIndex = Tuple[int, ...]


class Statistics(Enum):
    BOSON = "boson"
    FERMION = "fermion"

    @property
    def sign(self) -> int:
        """Sign carried by the pair exchange operator: +1 boson, -1 fermion."""
        return 1 if self is Statistics.BOSON else -1

    @classmethod
    def from_string(cls, text: str) -> "Statistics":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValidationError(
                f"unknown statistics {text!r}; expected 'boson' or 'fermion'"
            ) from None


@dataclass(frozen=True)
class SpinConfig:
    """Particle count N, local spin dimension n, and exchange statistics.

    The total dimension n^N is capped (default 4096) so that impossible
    dense-matrix requests fail fast instead of exhausting memory.
    """

    N: int
    n: int
    statistics: Statistics = Statistics.BOSON
    dim_cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        if self.N < 1:
            raise ValidationError(f"particle count N must be >= 1, got {self.N}")
        if self.n < 1:
            raise ValidationError(f"spin dimension n must be >= 1, got {self.n}")
        if not isinstance(self.statistics, Statistics):
            raise ValidationError("statistics must be a Statistics enum member")
        if self.n**self.N > self.dim_cap:
            raise ValidationError(
                f"total dimension n^N = {self.n}^{self.N} = {self.n**self.N} "
                f"exceeds the cap {self.dim_cap}"
            )

    @property
    def dim(self) -> int:
        return self.n**self.N


def _check_multi_index(idx: Sequence[int], cfg: SpinConfig) -> None:
    if len(idx) != cfg.N:
        raise ValidationError(
            f"multi-index length {len(idx)} does not match N = {cfg.N}"
        )
    for pos, a in enumerate(idx, start=1):
        if not 1 <= a <= cfg.n:
            raise ValidationError(
                f"component {a} at position {pos} is outside [1, {cfg.n}]"
            )


def encode(idx: Sequence[int], cfg: SpinConfig) -> int:
    """Flat index in [0, n^N) of a spin multi-index, row-major."""
    _check_multi_index(idx, cfg)
    flat = 0
    for a in idx:
        flat = flat * cfg.n + (a - 1)
    return flat


def decode(flat: int, cfg: SpinConfig) -> MultiIndex:
    """Inverse of encode."""
    if not 0 <= flat < cfg.dim:
        raise ValidationError(f"flat index {flat} outside [0, {cfg.dim})")
    out = []
    for _ in range(cfg.N):
        flat, r = divmod(flat, cfg.n)
        out.append(r + 1)
    return tuple(reversed(out))


def _normalize_pair(cfg: SpinConfig, i: int, j: int) -> Tuple[int, int]:
    """Order a site pair as (min, max); rejects i = j and out-of-range sites."""
    if i == j:
        raise ValidationError(f"site pair must be distinct, got ({i}, {j})")
    for s in (i, j):
        if not 1 <= s <= cfg.N:
            raise ValidationError(f"site {s} outside [1, {cfg.N}]")
    return (i, j) if i < j else (j, i)


def permutation_operator(cfg: SpinConfig, i: int, j: int) -> np.ndarray:
    """Pair exchange operator p^{ij}: swaps the spins of particles i and j.

    Real 0/1 entries; symmetric, orthogonal, and an involution.  Since
    p^{ij} = p^{ji}, the pair is normalized to (min, max).
    """
    i, j = _normalize_pair(cfg, i, j)
    shape = (cfg.n,) * (2 * cfg.N)
    p = np.eye(cfg.dim).reshape(shape)
    p = np.swapaxes(p, i - 1, j - 1)
    return np.ascontiguousarray(p.reshape(cfg.dim, cfg.dim).astype(complex))


def statistics_permutation(cfg: SpinConfig, i: int, j: int) -> np.ndarray:
    """Signed exchange operator P^{ij} = +p^{ij} for bosons, -p^{ij} for fermions."""
    return cfg.statistics.sign * permutation_operator(cfg, i, j)


def _inverse_axes(sigma: Tuple[int, ...]) -> list:
    """0-based axes list realizing (out)_{a} = (in)_{a o sigma} under np.transpose.

    np.transpose maps output axis k to input axis axes[k], i.e. the entry at
    output index i is the input entry at j with j_{axes[k]} = i_k; matching
    the component convention below requires axes = sigma^{-1} (0-based).
    """
    inv = [0] * len(sigma)
    for m, s in enumerate(sigma):
        inv[s - 1] = m
    return inv


def site_permutation_operator(cfg: SpinConfig, sigma: Sequence[int]) -> np.ndarray:
    """Operator for an arbitrary permutation sigma of the N sites.

    Component convention: (Pi_sigma v)_{a_1...a_N} = v_{a_sigma(1)...a_sigma(N)},
    so adjacent transpositions reproduce permutation_operator and composition
    satisfies Pi_sigma Pi_rho = Pi_{sigma o rho} with (sigma o rho)(m) =
    sigma(rho(m)).
    """
    sigma = tuple(sigma)
    if sorted(sigma) != list(range(1, cfg.N + 1)):
        raise ValidationError(f"{sigma} is not a permutation of 1..{cfg.N}")
    shape = (cfg.n,) * (2 * cfg.N)
    t = np.eye(cfg.dim).reshape(shape)
    axes = _inverse_axes(sigma) + list(range(cfg.N, 2 * cfg.N))
    t = np.transpose(t, axes)
    return np.ascontiguousarray(t.reshape(cfg.dim, cfg.dim).astype(complex))


def permutation_parity(sigma: Sequence[int]) -> int:
    """Parity of a permutation given in one-line notation (values 1..N)."""
    sigma = list(sigma)
    visited = [False] * len(sigma)
    parity = 0
    for start in range(len(sigma)):
        if visited[start]:
            continue
        length = 0
        pos = start
        while not visited[pos]:
            visited[pos] = True
            pos = sigma[pos] - 1
            length += 1
        parity += length - 1
    return parity % 2


def embed_two_site(cfg: SpinConfig, h: np.ndarray, i: int, j: int) -> np.ndarray:
    """Embed an n^2 x n^2 pair operator so it acts on particles (i, j).

    Particle i is paired with the first tensor slot of h.  For (i, j) = (1, 2)
    and N = 2 this returns h itself.  Entries of the result are entries of h
    (times exact 0/1 factors), so the embedding is exact.
    """
    i, j = _normalize_pair(cfg, i, j)
    n, N = cfg.n, cfg.N
    h = np.asarray(h, dtype=complex)
    if h.shape != (n * n, n * n):
        raise ValidationError(
            f"pair operator must be {n * n} x {n * n}, got {h.shape}"
        )
    if N == 2:
        return h.copy()
    h4 = h.reshape(n, n, n, n)
    letters = "abcdefghijklm"
    upper = "ABCDEFGHIJKLM"
    out = [letters[s] for s in range(N)]
    inn = [upper[s] for s in range(N)]
    subs = [f"{out[i - 1]}{out[j - 1]}{inn[i - 1]}{inn[j - 1]}"]
    ops = [h4]
    eye = np.eye(n)
    for s in range(N):
        if s not in (i - 1, j - 1):
            ops.append(eye)
            subs.append(f"{out[s]}{inn[s]}")
    spec = ",".join(subs) + "->" + "".join(out + inn)
    full = np.einsum(spec, *ops)
    return np.ascontiguousarray(full.reshape(cfg.dim, cfg.dim))


def apply_site_permutation(cfg: SpinConfig, sigma: Sequence[int], vec: np.ndarray) -> np.ndarray:
    """Apply the site permutation operator to a flat vector without building it."""
    sigma = tuple(sigma)
    v = np.asarray(vec).reshape((cfg.n,) * cfg.N)
    return np.ascontiguousarray(np.transpose(v, _inverse_axes(sigma))).reshape(-1)


def apply_two_site(cfg: SpinConfig, pair_op: np.ndarray, i: int, j: int,
                   vec: np.ndarray) -> np.ndarray:
    """Apply an embedded pair operator to a flat vector in pair space.

    Equivalent to embed_two_site(cfg, pair_op, i, j) @ vec but works in the
    n^2-dimensional pair space, so the cost stays linear in n^N.
    """
    i, j = _normalize_pair(cfg, i, j)
    n, N = cfg.n, cfg.N
    v = np.asarray(vec, dtype=complex).reshape((n,) * N)
    v = np.moveaxis(v, (i - 1, j - 1), (0, 1)).reshape(n * n, -1)
    w = np.asarray(pair_op, dtype=complex) @ v
    w = w.reshape((n, n) + (n,) * (N - 2))
    w = np.moveaxis(w, (0, 1), (i - 1, j - 1))
    return np.ascontiguousarray(w).reshape(-1)
