"""Bound-state spectra and factorized scattering matrices.

Delta-type couplings bind pairs through the derivative jump: a mode with
coupling eigenvalue L and decay rate kappa = (c + a L)/2 < 0 decays as
exp(kappa sum_{i>j} |x_i - x_j|), has purely imaginary, equally spaced
momenta, and energy -(c + a L)^2 N (N^2 - 1) / 12.  The spin vector must be
a simultaneous eigenvector of every embedded coupling and invariant under
every signed pair exchange; eigenspace intersections are computed
rank-revealingly so degenerate couplings are handled.

Separated conditions decouple the two sides of every hyperplane, so each
negative eigenvalue lambda of G yields a 2^(N(N-1)/2)-fold family labelled
by a sign per pair: the spatial factor flips sign (or not) across each
hyperplane independently.  The statistics relation P^{ij} v = eps_{ij} v can
only be satisfied for sign tables matching a one-dimensional character of
the permutation group; states from other tables are still eigenfunctions
(the sides are decoupled) and are emitted with statistics_compatible=False.

For real ordered momenta the scattering matrix factorizes into pair factors
X_{ij} = Y^{ij}_{ij} P^{ij} multiplied in a fixed bracket order; it is
unitary whenever the coupling commutes with the swap, and symmetric for
couplings inside the propagation-consistent family.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .bethe import BoundaryReport
from .errors import HyperplaneError, ValidationError
from .models import CouplingMatrix, SeparatedModel, swap_matrix
from .tensor_algebra import (
    SpinConfig,
    Statistics,
    embed_two_site,
    encode,
    permutation_parity,
    site_permutation_operator,
)
from .yang_baxter import MomentumSet, pair_exchange_matrix

INTERSECTION_TOL = 1e-10
EIG_CLUSTER_TOL = 1e-9
CROSSCHECK_TOL = 1e-12
EIGVEC_TOL = 1e-10


# ---------------------------------------------------------------------------
# subspace utilities


def _nullspace(A: np.ndarray, tol: float = INTERSECTION_TOL) -> np.ndarray:
    """Orthonormal basis (columns) of the nullspace of A, singular values < tol."""
    if A.size == 0:
        return np.eye(A.shape[1], dtype=complex)
    _, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s >= tol))
    return vh[rank:].conj().T


def _constrain(basis: np.ndarray, operator: np.ndarray, shift: complex) -> np.ndarray:
    """Orthonormal basis of {v in span(basis) : operator v = shift v}."""
    if basis.shape[1] == 0:
        return basis
    reduced = (operator @ basis) - shift * basis
    null = _nullspace(reduced)
    return basis @ null


def _statistics_symmetric_basis(cfg: SpinConfig) -> np.ndarray:
    """Orthonormal basis of {v : P^{ij} v = v for all pairs}.

    Built from the group-averaged projector (1/N!) sum_sigma s^parity Pi_sigma,
    which is Hermitian and idempotent.
    """
    dim = cfg.dim
    proj = np.zeros((dim, dim), dtype=complex)
    count = 0
    for sigma in itertools.permutations(range(1, cfg.N + 1)):
        sign = cfg.statistics.sign ** permutation_parity(sigma)
        proj += sign * site_permutation_operator(cfg, sigma)
        count += 1
    proj /= count
    vals, vecs = np.linalg.eigh(proj)
    return vecs[:, vals > 0.5]


def _eig_clusters(matrix: np.ndarray, tol: float = EIG_CLUSTER_TOL):
    """Eigen-decomposition of a Hermitian matrix with near-degenerate grouping.

    Returns a list of (mean eigenvalue, orthonormal eigenvector block).
    """
    vals, vecs = np.linalg.eigh(matrix)
    clusters = []
    start = 0
    for i in range(1, len(vals) + 1):
        if i == len(vals) or vals[i] - vals[i - 1] > tol:
            clusters.append((float(np.mean(vals[start:i])), vecs[:, start:i]))
            start = i
    return clusters


def _pair_eigenspace_on_full(cfg: SpinConfig, vecs: np.ndarray) -> np.ndarray:
    """Lift an eigenvector block of a pair matrix to the (1,2)-embedded space."""
    rest = cfg.dim // (cfg.n * cfg.n)
    return np.kron(vecs, np.eye(rest, dtype=complex))


def _all_pairs(N: int):
    return [(i, j) for i in range(1, N + 1) for j in range(i + 1, N + 1)]


# ---------------------------------------------------------------------------
# delta-coupling bound states


@dataclass(frozen=True)
class BoundStateMode:
    """One bound mode of a delta-type coupling.

    kappa = (c + a*lambda_val)/2 < 0 is the decay rate per coordinate pair;
    the momenta form the purely imaginary progression
    k_j = -i kappa (N + 1 - 2 j), and the energy equals both the closed form
    -(c + a L)^2 N (N^2 - 1)/12 and sum k_j^2.
    """

    lambda_val: float
    spin_vector: np.ndarray
    kappa: float
    momenta: MomentumSet
    energy: float

    def __post_init__(self):
        if not self.kappa < 0:
            raise ValidationError(
                f"decay rate must be negative for a bound state, got {self.kappa}"
            )
        total = sum(k * k for k in self.momenta.k)
        if abs(total - self.energy) > CROSSCHECK_TOL * max(1.0, abs(self.energy)):
            raise ValidationError(
                f"energy {self.energy} disagrees with sum of squared momenta {total}"
            )
        vec = np.asarray(self.spin_vector, dtype=complex).reshape(-1)
        vec.setflags(write=False)
        object.__setattr__(self, "spin_vector", vec)


def _bound_momenta(kappa: float, N: int) -> MomentumSet:
    return MomentumSet([-1j * kappa * (N + 1 - 2 * j) for j in range(1, N + 1)])


def _verify_simultaneous(cfg: SpinConfig, h: CouplingMatrix, lam: float,
                         vec: np.ndarray) -> None:
    p_pair = cfg.statistics.sign * swap_matrix(cfg.n)
    for (i, j) in _all_pairs(cfg.N):
        hv = embed_two_site(cfg, h.entries, i, j) @ vec
        if np.max(np.abs(hv - lam * vec)) > EIGVEC_TOL:
            raise ValidationError(
                f"candidate vector is not an eigenvector of the ({i},{j}) coupling"
            )
        pv = embed_two_site(cfg, p_pair, i, j) @ vec
        if np.max(np.abs(pv - vec)) > EIGVEC_TOL:
            raise ValidationError(
                f"candidate vector is not exchange invariant on pair ({i},{j})"
            )


def n_body_bound_states(cfg: SpinConfig, h: CouplingMatrix, a: float = 1.0,
                        c: float = 0.0) -> List[BoundStateMode]:
    """All bound modes of the N-body delta-type coupling.

    For each eigenvalue L of h with c + a L < 0, intersects the embedded
    eigenspace with the statistics-symmetric subspace and emits one mode per
    orthonormal basis vector of the intersection.  The empty list is a valid
    result (e.g. positive semi-definite couplings with a = 1, c = 0).
    """
    if cfg.N < 2:
        raise ValidationError("bound states need N >= 2")
    if h.n != cfg.n:
        raise ValidationError(f"coupling is for n = {h.n}, config has n = {cfg.n}")
    sym = _statistics_symmetric_basis(cfg)
    if sym.shape[1] == 0:
        return []
    h12 = embed_two_site(cfg, h.entries, 1, 2)
    modes: List[BoundStateMode] = []
    for lam, _vecs in _eig_clusters(h.entries):
        if c + a * lam >= 0:
            continue
        inter = _constrain(sym, h12, lam)
        kappa = (c + a * lam) / 2
        energy = -((c + a * lam) ** 2) * cfg.N * (cfg.N**2 - 1) / 12
        for col in range(inter.shape[1]):
            vec = inter[:, col]
            _verify_simultaneous(cfg, h, lam, vec)
            modes.append(
                BoundStateMode(
                    lambda_val=lam,
                    spin_vector=vec,
                    kappa=kappa,
                    momenta=_bound_momenta(kappa, cfg.N),
                    energy=energy,
                )
            )
    return modes


def two_body_bound_states(h: CouplingMatrix, a: float = 1.0, c: float = 0.0,
                          statistics: Statistics = Statistics.BOSON,
                          ) -> List[BoundStateMode]:
    """Two-body bound modes; the N = 2 case of n_body_bound_states.

    The mode count equals the dimension of the exchange-invariant part of
    each binding eigenspace, so it can reach n^2 but is generically smaller.
    """
    cfg = SpinConfig(N=2, n=h.n, statistics=statistics)
    return n_body_bound_states(cfg, h, a=a, c=c)


def bound_state_boundary_residual(cfg: SpinConfig, h: CouplingMatrix,
                                  mode: BoundStateMode, pair: Tuple[int, int],
                                  samples: Sequence[Sequence[float]],
                                  ) -> BoundaryReport:
    """Contact-condition residuals of the closed-form bound wavefunction.

    Evaluates psi = v exp(kappa sum_{i>j} |x_i - x_j|) and its one-sided
    normal derivatives directly (no Bethe coefficients) on the x_a = x_b
    hyperplane and checks continuity and the derivative jump against the
    coupling.  Residuals are relative to the local wavefunction magnitude.
    """
    a, b = min(pair), max(pair)
    if a == b or not (1 <= a <= cfg.N and 1 <= b <= cfg.N):
        raise ValidationError(f"bad particle pair {pair}")
    h_emb = embed_two_site(cfg, h.entries, a, b)
    v = mode.spin_vector
    cont_max = 0.0
    jump_max = 0.0
    for raw in samples:
        x = np.asarray(raw, dtype=float).reshape(-1)
        if x.size != cfg.N:
            raise ValidationError(f"sample has {x.size} coordinates, expected {cfg.N}")
        if abs(x[a - 1] - x[b - 1]) > 1e-12:
            raise HyperplaneError(f"sample does not lie on x_{a} = x_{b}")
        others = [x[q] for q in range(cfg.N) if q != b - 1]
        diffs = np.abs(np.subtract.outer(others, others))
        np.fill_diagonal(diffs, np.inf)
        if diffs.min() < 1e-9:
            raise HyperplaneError("sample lies on a second hyperplane")
        spread = sum(
            abs(x[i] - x[j]) for i in range(cfg.N) for j in range(i + 1, cfg.N)
        )
        amp = np.exp(mode.kappa * spread)
        phi = amp * v
        scale = float(np.max(np.abs(phi)))
        d_lo = -mode.kappa * phi
        d_hi = mode.kappa * phi
        r_cont = 0.0  # identical one-sided values by construction
        r_jump = float(np.max(np.abs((d_hi - d_lo) - h_emb @ phi))) / scale
        cont_max = max(cont_max, r_cont)
        jump_max = max(jump_max, r_jump)
    return BoundaryReport(continuity_max=cont_max, jump_max=jump_max)


# ---------------------------------------------------------------------------
# separated-condition bound states


@dataclass(frozen=True)
class SeparatedBoundState:
    """One bound state of the separated family.

    epsilon maps each pair (k, l) with k > l to the sign the spatial factor
    picks up across the x_k = x_l hyperplane.  statistics_compatible records
    whether the spin vector satisfies P^{ij} v = eps_{ij} v for every pair;
    incompatible tables still label valid eigenfunctions because the
    separated conditions decouple the regions.
    """

    lambda_val: float
    epsilon: Dict[Tuple[int, int], int]
    spin_vector: np.ndarray
    momenta: MomentumSet
    energy: float
    statistics_compatible: bool

    def __post_init__(self):
        total = sum(k * k for k in self.momenta.k)
        if abs(total - self.energy) > CROSSCHECK_TOL * max(1.0, abs(self.energy)):
            raise ValidationError(
                f"energy {self.energy} disagrees with sum of squared momenta {total}"
            )
        vec = np.asarray(self.spin_vector, dtype=complex).reshape(-1)
        vec.setflags(write=False)
        object.__setattr__(self, "spin_vector", vec)
        object.__setattr__(self, "epsilon", dict(self.epsilon))


def _as_uniform_separated(G) -> np.ndarray:
    if isinstance(G, SeparatedModel):
        if not G.is_uniform:
            raise ValidationError(
                "separated bound states are available for equal side matrices only"
            )
        return G.G_plus
    arr = np.asarray(G, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"G must be square, got {arr.shape}")
    resid = float(np.max(np.abs(arr - arr.conj().T)))
    if resid > 1e-12:
        raise ValidationError(f"G is not Hermitian (deviation {resid:.3e})")
    return arr


def separated_bound_states(cfg: SpinConfig, G) -> List[SeparatedBoundState]:
    """Bound states of uniform separated conditions, all sign tables.

    For each eigenvalue lambda < 0 of G: the admissible spin vectors span
    the intersection of the embedded lambda-eigenspaces over all pairs.  Per
    sign table, vectors additionally satisfying the statistics relation are
    emitted one state per basis vector; a table whose constrained
    intersection is empty still contributes one representative state per the
    sign degeneracy of the decoupled regions, flagged incompatible.
    """
    garr = _as_uniform_separated(G)
    if garr.shape != (cfg.n * cfg.n, cfg.n * cfg.n):
        raise ValidationError(
            f"G must be {cfg.n**2} x {cfg.n**2} for n = {cfg.n}, got {garr.shape}"
        )
    if cfg.N < 2:
        raise ValidationError("bound states need N >= 2")
    pairs_desc = [(k, l) for k in range(2, cfg.N + 1) for l in range(1, k)]
    p_embedded = {
        (k, l): embed_two_site(cfg, swap_matrix(cfg.n), l, k) for (k, l) in pairs_desc
    }
    g_embedded = {
        (k, l): embed_two_site(cfg, garr, l, k) for (k, l) in pairs_desc
    }
    states: List[SeparatedBoundState] = []
    for lam, vecs in _eig_clusters(garr):
        if lam >= 0:
            continue
        basis = _pair_eigenspace_on_full(cfg, vecs)
        for (k, l) in pairs_desc[1:]:
            basis = _constrain(basis, g_embedded[(k, l)], lam)
            if basis.shape[1] == 0:
                break
        if basis.shape[1] == 0:
            continue
        momenta = MomentumSet(
            [1j * lam * (cfg.N + 1 - 2 * j) for j in range(1, cfg.N + 1)]
        )
        energy = -(lam**2) * cfg.N * (cfg.N**2 - 1) / 3
        for signs in itertools.product((1, -1), repeat=len(pairs_desc)):
            table = dict(zip(pairs_desc, signs))
            constrained = basis
            for (k, l) in pairs_desc:
                t = cfg.statistics.sign * table[(k, l)]
                constrained = _constrain(constrained, p_embedded[(k, l)], t)
                if constrained.shape[1] == 0:
                    break
            if constrained.shape[1] > 0:
                for col in range(constrained.shape[1]):
                    states.append(
                        SeparatedBoundState(
                            lambda_val=lam,
                            epsilon=table,
                            spin_vector=constrained[:, col],
                            momenta=momenta,
                            energy=energy,
                            statistics_compatible=True,
                        )
                    )
            else:
                states.append(
                    SeparatedBoundState(
                        lambda_val=lam,
                        epsilon=table,
                        spin_vector=basis[:, 0],
                        momenta=momenta,
                        energy=energy,
                        statistics_compatible=False,
                    )
                )
    return states


def separated_boundary_residual(cfg: SpinConfig, G, state: SeparatedBoundState,
                                pair: Tuple[int, int],
                                samples: Sequence[Sequence[float]],
                                ) -> BoundaryReport:
    """One-sided condition residuals of a separated bound state.

    Checks psi' = G psi on the upper side and -psi' = G psi (inward normal)
    on the lower side of the x_a = x_b hyperplane, using the closed form
    directly.  continuity_max holds the upper-side residual and jump_max the
    lower-side one.
    """
    garr = _as_uniform_separated(G)
    a, b = min(pair), max(pair)
    if a == b or not (1 <= a <= cfg.N and 1 <= b <= cfg.N):
        raise ValidationError(f"bad particle pair {pair}")
    g_emb = embed_two_site(cfg, garr, a, b)
    lam = state.lambda_val
    v = state.spin_vector
    hi_max = 0.0
    lo_max = 0.0
    for raw in samples:
        x = np.asarray(raw, dtype=float).reshape(-1)
        if x.size != cfg.N:
            raise ValidationError(f"sample has {x.size} coordinates, expected {cfg.N}")
        if abs(x[a - 1] - x[b - 1]) > 1e-12:
            raise HyperplaneError(f"sample does not lie on x_{a} = x_{b}")
        spread = sum(
            abs(x[i] - x[j]) for i in range(cfg.N) for j in range(i + 1, cfg.N)
        )
        amp = np.exp(lam * spread)
        # spatial sign factor common to both sides: pairs not involving the
        # tie contribute eps when inverted; the tied pair contributes 1 on
        # the lower side and eps_{ba} on the upper side.
        factor = 1.0
        for (k, l) in state.epsilon:
            if (k, l) == (b, a):
                continue
            if x[k - 1] < x[l - 1]:
                factor *= state.epsilon[(k, l)]
        phi_lo = factor * amp * v
        phi_hi = state.epsilon[(b, a)] * phi_lo
        d_lo = -lam * phi_lo
        d_hi = lam * phi_hi
        scale = float(np.max(np.abs(phi_lo)))
        hi_max = max(hi_max, float(np.max(np.abs(d_hi - g_emb @ phi_hi))) / scale)
        lo_max = max(lo_max, float(np.max(np.abs(-d_lo - g_emb @ phi_lo))) / scale)
    return BoundaryReport(continuity_max=hi_max, jump_max=lo_max)


# ---------------------------------------------------------------------------
# scattering


@dataclass(frozen=True)
class ScatteringMatrix:
    """Factorized multi-particle scattering matrix with momentum metadata."""

    matrix: np.ndarray
    ks: MomentumSet
    cfg: SpinConfig


def _pair_x_matrix(cfg: SpinConfig, h: CouplingMatrix, k: complex) -> np.ndarray:
    """Pair-space factor X = Y P for one exchanged pair."""
    y = pair_exchange_matrix(h, k, cfg.statistics)
    return y @ (cfg.statistics.sign * swap_matrix(cfg.n))


def scattering_matrix(cfg: SpinConfig, h: CouplingMatrix,
                      ks: MomentumSet) -> ScatteringMatrix:
    """Scattering matrix for real, strictly increasing momenta.

    Product of the pair factors X_{ij} = Y^{ij}_{ij} P^{ij} grouped by the
    slower particle: all X_{*1} first, then X_{*2}, ending with X_{N,N-1}.
    Unitary whenever the coupling commutes with the swap.
    """
    if h.n != cfg.n:
        raise ValidationError(f"coupling is for n = {h.n}, config has n = {cfg.n}")
    if len(ks) != cfg.N:
        raise ValidationError(f"{len(ks)} momenta for N = {cfg.N} particles")
    kr = []
    for k in ks.k:
        if abs(k.imag) > 0:
            raise ValidationError("scattering momenta must be real")
        kr.append(k.real)
    if any(k2 <= k1 for k1, k2 in zip(kr[:-1], kr[1:])):
        raise ValidationError(f"momenta must be strictly increasing, got {kr}")
    S = np.eye(cfg.dim, dtype=complex)
    for j in range(1, cfg.N):
        for i in range(j + 1, cfg.N + 1):
            x_pair = _pair_x_matrix(cfg, h, (ks[i - 1] - ks[j - 1]) / 2)
            S = S @ embed_two_site(cfg, x_pair, j, i)
    return ScatteringMatrix(matrix=S, ks=ks, cfg=cfg)


def cluster_scattering_matrix(cfg: SpinConfig, h: CouplingMatrix,
                              cluster_a: Sequence[int], cluster_b: Sequence[int],
                              ks: MomentumSet) -> ScatteringMatrix:
    """Scattering of two ordered particle clusters.

    Multiplies the inter-cluster factors X_{ji} (j in cluster B, i in
    cluster A) bracketed per member of cluster A, last member first; for
    clusters (1,2) and (3,4,5) the product is
    [X_32 X_42 X_52][X_31 X_41 X_51].  Momenta may be complex (bound-state
    constituents carry string-shifted momenta), in which case the result is
    not unitary.
    """
    if h.n != cfg.n:
        raise ValidationError(f"coupling is for n = {h.n}, config has n = {cfg.n}")
    if len(ks) != cfg.N:
        raise ValidationError(f"{len(ks)} momenta for N = {cfg.N} particles")
    ca = [int(i) for i in cluster_a]
    cb = [int(j) for j in cluster_b]
    combined = ca + cb
    if sorted(combined) != list(range(1, cfg.N + 1)):
        raise ValidationError(
            f"clusters {ca} and {cb} do not partition 1..{cfg.N}"
        )
    S = np.eye(cfg.dim, dtype=complex)
    for i in reversed(ca):
        for j in cb:
            x_pair = _pair_x_matrix(cfg, h, (ks[j - 1] - ks[i - 1]) / 2)
            S = S @ embed_two_site(cfg, x_pair, min(i, j), max(i, j))
    return ScatteringMatrix(matrix=S, ks=ks, cfg=cfg)


def s_element(S: ScatteringMatrix, out_spins: Sequence[int],
              in_spins: Sequence[int]) -> complex:
    """Matrix element <out_spins | S | in_spins> in the multi-index basis."""
    row = encode(tuple(out_spins), S.cfg)
    col = encode(tuple(in_spins), S.cfg)
    return complex(S.matrix[row, col])


def unitarity_residual(S: ScatteringMatrix) -> float:
    """Max norm of S^+ S - 1."""
    m = S.matrix
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def symmetry_residual(S: ScatteringMatrix) -> float:
    """Max norm of S - S^T."""
    return float(np.max(np.abs(S.matrix - S.matrix.T)))
