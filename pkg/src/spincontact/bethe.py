"""Bethe coefficient propagation and wavefunction evaluation.

In the fundamental region x_1 <= x_2 <= ... <= x_N the ansatz is the N!-term
sum

    Psi(x) = sum_pi u_pi exp(i sum_m k_{pi(m)} x_m)

over permutations pi of the momentum labels.  Everywhere else the value
follows from exchange symmetry: with sigma the permutation sorting the
coordinates (x_{sigma(1)} < ... < x_{sigma(N)}) and s = +1 for bosons, -1
for fermions,

    Psi(x) = s^{parity(sigma)} Pi_sigma Psi_fund(sorted x),

where Pi_sigma permutes the spin slots.  Crossing the coincidence hyperplane
of the particles at adjacent sorted positions relates coefficient pairs
through the exchange operator: with a = pi(j), b = pi(j+1),

    u_{pi o tau_j} = (2ik_ab - h_{j,j+1})^{-1} (2ik_ab P^{j,j+1} + h_{j,j+1}) u_pi,

k_ab = (k_a - k_b)/2.  Propagating u over all N! orderings is path
independent exactly when the spectral Yang-Baxter relations hold; the
breadth-first walk below records the discrepancy whenever an ordering is
reached a second time and fails loudly above tolerance.

Derivatives are taken analytically term by term; the ansatz is a finite
exponential sum, so no numerical differentiation enters.  Residuals are
reported relative to the max norm of the seed coefficient vector.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from .errors import HyperplaneError, PropagationError, ValidationError
from .models import BlockBC, CouplingMatrix, SeparatedModel
from .tensor_algebra import (
    SpinConfig,
    apply_site_permutation,
    apply_two_site,
    embed_two_site,
    permutation_parity,
)
from .yang_baxter import MomentumSet, pair_exchange_matrix

CONSISTENCY_TOL = 1e-8

Permutation = Tuple[int, ...]


@dataclass(frozen=True)
class BetheCoefficients:
    """All N! coefficient vectors of the ansatz, keyed by momentum ordering."""

    cfg: SpinConfig
    ks: MomentumSet
    table: Dict[Permutation, np.ndarray]
    u_identity: np.ndarray
    max_discrepancy: float


@dataclass(frozen=True)
class WavefunctionSample:
    """Value and analytic gradient of the wavefunction at one point.

    gradient[i] is the derivative with respect to coordinate x_{i+1}; it is
    computed from the same exponential sum as the value.
    """

    value: np.ndarray
    gradient: np.ndarray


@dataclass(frozen=True)
class BoundaryReport:
    """Max-norm boundary residuals over a set of hyperplane samples.

    For a transmission-type BlockBC, continuity_max is the residual of the
    value equation and jump_max that of the derivative equation.  For a
    SeparatedModel the fields hold the upper-side and lower-side one-sided
    condition residuals respectively.
    """

    continuity_max: float
    jump_max: float

    @property
    def max(self) -> float:
        return max(self.continuity_max, self.jump_max)


def energy(ks: MomentumSet) -> complex:
    """Total energy sum_j k_j^2 of a momentum set."""
    return complex(sum(k * k for k in ks.k))


def propagate_coefficients(cfg: SpinConfig, h: CouplingMatrix, ks: MomentumSet,
                           u_identity, *,
                           consistency_tol: float = CONSISTENCY_TOL) -> BetheCoefficients:
    """Fill the coefficient table over all N! momentum orderings.

    Breadth-first over the adjacent-transposition graph starting from the
    identity ordering.  Every revisit of an ordering cross-checks the two
    routes; the largest relative discrepancy is stored, and exceeding
    consistency_tol raises PropagationError naming the ordering pair (the
    signal that the exchange relations do not close for this coupling).
    """
    if h.n != cfg.n:
        raise ValidationError(f"coupling is for n = {h.n}, config has n = {cfg.n}")
    if len(ks) != cfg.N:
        raise ValidationError(f"{len(ks)} momenta for N = {cfg.N} particles")
    u0 = np.asarray(u_identity, dtype=complex).reshape(-1)
    if u0.shape != (cfg.dim,):
        raise ValidationError(
            f"seed vector has size {u0.size}, expected {cfg.dim}"
        )
    scale = float(np.max(np.abs(u0)))
    if scale == 0.0:
        raise ValidationError("seed coefficient vector must be nonzero")

    pair_cache: Dict[Tuple[int, int], np.ndarray] = {}

    def exchange(a: int, b: int) -> np.ndarray:
        if (a, b) not in pair_cache:
            k = (ks[a - 1] - ks[b - 1]) / 2
            pair_cache[(a, b)] = pair_exchange_matrix(h, k, cfg.statistics)
        return pair_cache[(a, b)]

    identity = tuple(range(1, cfg.N + 1))
    table: Dict[Permutation, np.ndarray] = {identity: u0.copy()}
    queue = deque([identity])
    max_disc = 0.0
    while queue:
        perm = queue.popleft()
        vec = table[perm]
        for slot in range(1, cfg.N):
            a, b = perm[slot - 1], perm[slot]
            target = perm[:slot - 1] + (b, a) + perm[slot + 1:]
            cand = apply_two_site(cfg, exchange(a, b), slot, slot + 1, vec)
            known = table.get(target)
            if known is None:
                table[target] = cand
                queue.append(target)
            else:
                disc = float(np.max(np.abs(cand - known))) / scale
                if disc > consistency_tol:
                    raise PropagationError(
                        f"orderings {perm} -> {target} disagree by {disc:.3e} "
                        f"(tolerance {consistency_tol:.0e}); the exchange "
                        "relations do not close for this coupling",
                        permutation_pair=(perm, target),
                        discrepancy=disc,
                    )
                max_disc = max(max_disc, disc)
    return BetheCoefficients(cfg=cfg, ks=ks, table=table, u_identity=u0,
                             max_discrepancy=max_disc)


def _fundamental_sample(coeffs: BetheCoefficients, y: np.ndarray):
    """Value and per-position gradient of the fundamental-region sum at y."""
    cfg, ks = coeffs.cfg, coeffs.ks
    value = np.zeros(cfg.dim, dtype=complex)
    grad = np.zeros((cfg.N, cfg.dim), dtype=complex)
    for perm, u in coeffs.table.items():
        kvec = np.array([ks[p - 1] for p in perm])
        phase = np.exp(1j * np.dot(kvec, y))
        term = u * phase
        value += term
        for m in range(cfg.N):
            grad[m] += 1j * kvec[m] * term
    return value, grad


def _one_sided_sample(coeffs: BetheCoefficients, point: np.ndarray,
                      sigma: Permutation) -> WavefunctionSample:
    """Evaluate via the region whose sorted order is sigma (a first at ties)."""
    cfg = coeffs.cfg
    y = np.array([point[s - 1] for s in sigma], dtype=float)
    base_val, base_grad = _fundamental_sample(coeffs, y)
    sign = cfg.statistics.sign ** permutation_parity(sigma)
    value = sign * apply_site_permutation(cfg, sigma, base_val)
    inv = {s: m for m, s in enumerate(sigma)}
    gradient = np.zeros((cfg.N, cfg.dim), dtype=complex)
    for i in range(1, cfg.N + 1):
        gradient[i - 1] = sign * apply_site_permutation(cfg, sigma, base_grad[inv[i]])
    return WavefunctionSample(value=value, gradient=gradient)


def evaluate(coeffs: BetheCoefficients, point: Sequence[float]) -> WavefunctionSample:
    """Wavefunction value and gradient at a point with distinct coordinates.

    The coordinates are sorted to locate the region; the fundamental-region
    sum is evaluated at the sorted point and mapped back by the statistics
    extension.  Coincident coordinates are rejected: one-sided limits on a
    hyperplane are the business of boundary_residual.
    """
    x = np.asarray(point, dtype=float).reshape(-1)
    if x.size != coeffs.cfg.N:
        raise ValidationError(f"point has {x.size} coordinates, expected {coeffs.cfg.N}")
    order = np.argsort(x, kind="stable")
    for u, v in zip(order[:-1], order[1:]):
        if x[u] == x[v]:
            raise HyperplaneError(
                f"coordinates {u + 1} and {v + 1} coincide at {x[u]}; use "
                "boundary_residual for one-sided limits on a hyperplane"
            )
    sigma = tuple(int(s) + 1 for s in order)
    return _one_sided_sample(coeffs, x, sigma)


def _tie_orders(x: np.ndarray, a: int, b: int):
    """Sorting permutations with the (a, b) tie broken each way: a-first, b-first."""
    def sort_with(first: int, second: int) -> Permutation:
        rank = {first: 0, second: 1}
        idx = sorted(range(1, len(x) + 1), key=lambda q: (x[q - 1], rank.get(q, 0)))
        return tuple(idx)

    return sort_with(a, b), sort_with(b, a)


def boundary_residual(coeffs: BetheCoefficients, bc, pair: Tuple[int, int],
                      samples: Sequence[Sequence[float]]) -> BoundaryReport:
    """Residuals of the contact boundary conditions across one hyperplane.

    Each sample must have coordinates x_a = x_b for the given particle pair
    and all other coordinates distinct (a second coincidence is rejected).
    One-sided limits are taken analytically from the region formulas on both
    sides of the hyperplane; the normal derivative is (d/dx_a - d/dx_b)/2
    with a < b, and the boundary blocks are embedded with particle a in the
    first pair slot.

    bc may be a BlockBC (value and derivative equations across the
    hyperplane) or a SeparatedModel (independent one-sided conditions, with
    the inward normal on the lower side).  Residuals are max norms relative
    to the max norm of the seed coefficient vector.
    """
    cfg = coeffs.cfg
    a, b = pair
    if a == b:
        raise ValidationError(f"pair must be distinct, got {pair}")
    a, b = min(a, b), max(a, b)
    if not (1 <= a <= cfg.N and 1 <= b <= cfg.N):
        raise ValidationError(f"pair {pair} outside [1, {cfg.N}]")
    if isinstance(bc, BlockBC):
        blocks = [bc.A, bc.B, bc.C, bc.D]
        separated = False
    elif isinstance(bc, SeparatedModel):
        blocks = [bc.G_plus, bc.G_minus]
        separated = True
    else:
        raise ValidationError("bc must be a BlockBC or a SeparatedModel")
    d_pair = cfg.n * cfg.n
    if blocks[0].shape != (d_pair, d_pair):
        raise ValidationError(
            f"boundary blocks are {blocks[0].shape[0]} x {blocks[0].shape[0]}, "
            f"expected {d_pair} x {d_pair}"
        )
    embedded = [embed_two_site(cfg, blk, a, b) for blk in blocks]
    scale = float(np.max(np.abs(coeffs.u_identity)))

    cont_max = 0.0
    jump_max = 0.0
    for raw in samples:
        x = np.asarray(raw, dtype=float).reshape(-1)
        if x.size != cfg.N:
            raise ValidationError(f"sample has {x.size} coordinates, expected {cfg.N}")
        if abs(x[a - 1] - x[b - 1]) > 1e-12:
            raise HyperplaneError(
                f"sample does not lie on the x_{a} = x_{b} hyperplane"
            )
        vals = sorted((x[q - 1], q) for q in range(1, cfg.N + 1) if q != b)
        for (v1, q1), (v2, q2) in zip(vals[:-1], vals[1:]):
            if v1 == v2:
                raise HyperplaneError(
                    f"sample lies on a second hyperplane (x_{q1} = x_{q2})"
                )
        sig_minus, sig_plus = _tie_orders(x, a, b)
        lo = _one_sided_sample(coeffs, x, sig_minus)
        hi = _one_sided_sample(coeffs, x, sig_plus)
        d_lo = (lo.gradient[a - 1] - lo.gradient[b - 1]) / 2
        d_hi = (hi.gradient[a - 1] - hi.gradient[b - 1]) / 2
        if separated:
            g_plus, g_minus = embedded
            r_hi = np.max(np.abs(d_hi - g_plus @ hi.value))
            r_lo = np.max(np.abs(-d_lo - g_minus @ lo.value))
            cont_max = max(cont_max, float(r_hi) / scale)
            jump_max = max(jump_max, float(r_lo) / scale)
        else:
            A, B, C, D = embedded
            r_cont = np.max(np.abs(hi.value - (A @ lo.value + B @ d_lo)))
            r_jump = np.max(np.abs(d_hi - (C @ lo.value + D @ d_lo)))
            cont_max = max(cont_max, float(r_cont) / scale)
            jump_max = max(jump_max, float(r_jump) / scale)
    return BoundaryReport(continuity_max=cont_max, jump_max=jump_max)


def hyperplane_samples(N: int, pair: Tuple[int, int], count: int, uniform,
                       span: float = 2.0, min_gap: float = 0.05):
    """Random sample points on the x_a = x_b hyperplane, other pairs separated.

    uniform is a zero-argument callable returning floats in [0, 1); pass
    e.g. a generator method so that sampling stays deterministic under a
    fixed seed.
    """
    a, b = min(pair), max(pair)
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 1000 * count:
            raise RuntimeError("could not draw separated hyperplane samples")
        x = np.array([span * (2 * uniform() - 1) for _ in range(N)])
        x[b - 1] = x[a - 1]
        vals = [x[q] for q in range(N) if q != b - 1]
        diffs = np.abs(np.subtract.outer(vals, vals))
        np.fill_diagonal(diffs, np.inf)
        if diffs.min() > min_gap:
            out.append(x)
    return out
