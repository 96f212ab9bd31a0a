"""Spin-coupling matrices and contact boundary-condition data.

A contact interaction between two spin-(n-1)/2 particles is encoded either by
an n^2 x n^2 Hermitian coupling matrix h (delta-type interactions, where the
wavefunction stays continuous and its normal derivative jumps by h at
coincidence) or, in full generality, by a 2x2 block matrix acting on the
boundary data (value, derivative):

    (psi, psi')_{0+} = (A B; C D) (psi, psi')_{0-}

Self-adjointness of the underlying operator constrains the blocks:

    A^+ D - C^+ B = 1,    B^+ D = D^+ B,    A^+ C = C^+ A

(dagger = conjugate transpose).  Separated conditions decouple the two sides
instead: psi' = G+ psi on the upper side and, with the inward normal,
-psi' = G- psi on the lower side, with G+- Hermitian.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .tensor_algebra import SpinConfig, Statistics, permutation_operator

HERMITIAN_TOL = 1e-12
ALGEBRA_TOL = 1e-12


DEFAULT_PAIR_CAP = 4096


def _max_abs(a) -> float:
    return float(np.max(np.abs(a))) if np.asarray(a).size else 0.0


def swap_matrix(n: int) -> np.ndarray:
    """The n^2 x n^2 two-site spin swap."""
    cfg = SpinConfig(N=2, n=n, dim_cap=max(DEFAULT_PAIR_CAP, n * n))
    return permutation_operator(cfg, 1, 2)


def _as_square(entries, dim: int, what: str) -> np.ndarray:
    arr = np.asarray(entries, dtype=complex)
    if arr.shape != (dim, dim):
        raise ValidationError(f"{what} must be {dim} x {dim}, got {arr.shape}")
    return arr


def _require_hermitian(arr: np.ndarray, what: str, tol: float = HERMITIAN_TOL) -> None:
    resid = _max_abs(arr - arr.conj().T)
    if resid > tol:
        raise ValidationError(
            f"{what} is not Hermitian (max deviation {resid:.3e} > {tol:.0e})"
        )


@dataclass(frozen=True)
class CouplingMatrix:
    """Hermitian n^2 x n^2 spin-coupling matrix of a delta-type interaction."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        arr = _as_square(self.entries, self.n * self.n, "coupling matrix")
        _require_hermitian(arr, "coupling matrix")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.n * self.n


@dataclass(frozen=True)
class SpinHalfParams:
    """Parameters of the general swap-commuting spin-1/2 coupling.

    Diagonal entries of a Hermitian matrix are real, so a_d, b_d, f_d are real
    by construction; the pair-symmetric off-diagonal g_d is forced real by the
    swap symmetry combined with Hermiticity.
    """

    a_d: float
    b_d: float
    f_d: float
    g_d: float
    c_x: complex = 0.0
    e1: complex = 0.0
    e2: complex = 0.0

    def __post_init__(self):
        for name in ("a_d", "b_d", "f_d", "g_d"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValidationError(f"{name} must be finite, got {v}")
        for name in ("c_x", "e1", "e2"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValidationError(f"{name} must be finite, got {v}")


def spin_half_coupling(params: SpinHalfParams) -> CouplingMatrix:
    """The general 4x4 Hermitian coupling commuting with the spin swap (n = 2)."""
    a, b, f, g = params.a_d, params.b_d, params.f_d, params.g_d
    c, e1, e2 = complex(params.c_x), complex(params.e1), complex(params.e2)
    m = np.array(
        [
            [a, e1, e1, c],
            [np.conj(e1), f, g, e2],
            [np.conj(e1), g, f, e2],
            [np.conj(c), np.conj(e2), np.conj(e2), b],
        ],
        dtype=complex,
    )
    return CouplingMatrix(n=2, entries=m)


@dataclass(frozen=True)
class CouplingReport:
    hermitian: bool
    commutes_with_swap: bool
    hermiticity_residual: float
    commutator_residual: float

    @property
    def ok(self) -> bool:
        return self.hermitian and self.commutes_with_swap


def validate_coupling(h, tol: float = ALGEBRA_TOL) -> CouplingReport:
    """Check Hermiticity and commutation with the two-site swap.

    Accepts a CouplingMatrix or a bare square array (so that failing inputs
    can be diagnosed).  The commutator verdict is the same for both
    statistics because the sign cancels in [h, +-p].
    """
    arr = h.entries if isinstance(h, CouplingMatrix) else np.asarray(h, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"coupling must be square, got shape {arr.shape}")
    n = math.isqrt(arr.shape[0])
    if n * n != arr.shape[0]:
        raise ValidationError(
            f"coupling dimension {arr.shape[0]} is not a perfect square"
        )
    p = swap_matrix(n)
    herm = _max_abs(arr - arr.conj().T)
    comm = _max_abs(arr @ p - p @ arr)
    return CouplingReport(
        hermitian=herm < tol,
        commutes_with_swap=comm < tol,
        hermiticity_residual=herm,
        commutator_residual=comm,
    )


def project_to_commutant(M) -> CouplingMatrix:
    """Nearest-in-structure swap-commuting Hermitian matrix: Herm((M + pMp)/2).

    Idempotent, and the identity on inputs that already satisfy both
    predicates.  Used to generate admissible couplings from arbitrary seeds.
    """
    arr = np.asarray(M, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"input must be square, got shape {arr.shape}")
    n = math.isqrt(arr.shape[0])
    if n * n != arr.shape[0]:
        raise ValidationError(f"dimension {arr.shape[0]} is not a perfect square")
    p = swap_matrix(n)
    sym = (arr + p @ arr @ p) / 2
    herm = (sym + sym.conj().T) / 2
    return CouplingMatrix(n=n, entries=herm)


def consistent_coupling(n: int, statistics: Statistics, scalar: float,
                        minus_block) -> CouplingMatrix:
    """Coupling for which multi-particle coefficient propagation closes.

    Acts as `scalar` times the identity on the pair subspace where the signed
    exchange P = +-p equals +1, and as an arbitrary Hermitian `minus_block`
    on the complementary subspace.  Commuting with the swap is necessary for
    the exchange relations but not sufficient; this is the family for which
    the three-body relations actually hold.  For n = 2 with fermion
    statistics the +1 subspace of P is one-dimensional, so every
    swap-commuting coupling belongs to the family.
    """
    p = swap_matrix(n)
    d = n * n
    plus = (np.eye(d) + statistics.sign * p) / 2
    minus = np.eye(d) - plus
    blk = _as_square(minus_block, d, "minus_block")
    _require_hermitian(blk, "minus_block")
    return CouplingMatrix(n=n, entries=scalar * plus + minus @ blk @ minus)


def random_consistent_coupling(n: int, statistics: Statistics,
                               rng: np.random.Generator,
                               scale: float = 1.0) -> CouplingMatrix:
    """Random member of the propagation-consistent family (see consistent_coupling)."""
    d = n * n
    raw = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    blk = scale * (raw + raw.conj().T) / 2
    scalar = float(scale * rng.uniform(-2.0, 2.0))
    return consistent_coupling(n, statistics, scalar, blk)


@dataclass(frozen=True)
class ScalarBC:
    """Scalar contact boundary condition (phi, phi')_{0+} = e^{i theta} (a b; c d) (phi, phi')_{0-}.

    The phase theta is redundant for spectral questions (a gauge choice); it
    is stored for completeness but no solver consumes it.
    """

    theta: float
    a: float
    b: float
    c: float
    d: float


def validate_scalar_bc(bc: ScalarBC, tol: float = ALGEBRA_TOL) -> bool:
    """True iff the transfer matrix is unimodular: |ad - bc - 1| < tol."""
    return abs(bc.a * bc.d - bc.b * bc.c - 1.0) < tol


@dataclass(frozen=True)
class BlockBC:
    """Block boundary condition (psi, psi')_{0+} = (A B; C D) (psi, psi')_{0-}.

    Blocks are stored as given; validity is checked by validate_block_bc so
    that invalid inputs can be constructed and diagnosed.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        blocks = {}
        dim = None
        for name in "ABCD":
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValidationError(f"block {name} must be square, got {arr.shape}")
            if dim is None:
                dim = arr.shape[0]
            elif arr.shape[0] != dim:
                raise ValidationError(
                    f"block {name} is {arr.shape[0]} x {arr.shape[0]}, expected {dim}"
                )
            arr = arr.copy()
            arr.setflags(write=False)
            blocks[name] = arr
        for name, arr in blocks.items():
            object.__setattr__(self, name, arr)

    @property
    def dim(self) -> int:
        return self.A.shape[0]


@dataclass(frozen=True)
class BlockBCReport:
    """Residuals of the three self-adjointness conditions on (A, B, C, D)."""

    cond1: bool
    cond2: bool
    cond3: bool
    residuals: tuple

    @property
    def all_ok(self) -> bool:
        return self.cond1 and self.cond2 and self.cond3


def validate_block_bc(bc: BlockBC, tol: float = ALGEBRA_TOL) -> BlockBCReport:
    """Check A^+D - C^+B = 1, B^+D = D^+B, A^+C = C^+A in max norm."""
    A, B, C, D = bc.A, bc.B, bc.C, bc.D
    eye = np.eye(bc.dim)
    r1 = _max_abs(A.conj().T @ D - C.conj().T @ B - eye)
    r2 = _max_abs(B.conj().T @ D - D.conj().T @ B)
    r3 = _max_abs(A.conj().T @ C - C.conj().T @ A)
    return BlockBCReport(r1 < tol, r2 < tol, r3 < tol, (r1, r2, r3))


def bound1_bc(B) -> BlockBC:
    """Boundary condition with identity diagonal and a Hermitian upper block:
    psi_{0+} = psi_{0-} + B psi'_{0-},  psi'_{0+} = psi'_{0-}.
    """
    arr = np.asarray(B, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"B must be square, got {arr.shape}")
    _require_hermitian(arr, "B")
    eye = np.eye(arr.shape[0])
    return BlockBC(A=eye, B=arr, C=np.zeros_like(arr), D=eye)


def bound2_bc(B) -> BlockBC:
    """Pure phase-jump boundary condition from the Cayley transform of B.

    Both diagonal blocks equal U = (2 - iB)^{-1} (2 + iB), which is unitary
    for Hermitian B.  Equal blocks are forced by the self-adjointness
    conditions: with zero off-diagonal blocks they require A^+ D = 1, i.e.
    D = A for unitary A.  Putting the inverse phase on the derivative block
    instead would violate A^+ D - C^+ B = 1 for every nonzero B (the residual
    per eigenvalue t of B is 8|t| / (4 + t^2)).
    """
    arr = np.asarray(B, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"B must be square, got {arr.shape}")
    _require_hermitian(arr, "B")
    eye = np.eye(arr.shape[0])
    U = np.linalg.solve(2 * eye - 1j * arr, 2 * eye + 1j * arr)
    zero = np.zeros_like(arr)
    return BlockBC(A=U, B=zero, C=zero, D=U.copy())


def delta_bc(h: CouplingMatrix) -> BlockBC:
    """Boundary condition of the delta-type interaction: continuity plus a
    derivative jump equal to h times the boundary value."""
    if not isinstance(h, CouplingMatrix):
        raise ValidationError("delta_bc expects a CouplingMatrix")
    eye = np.eye(h.dim)
    return BlockBC(A=eye, B=np.zeros_like(h.entries), C=h.entries, D=eye)


@dataclass(frozen=True)
class SeparatedModel:
    """Separated boundary conditions, one Hermitian matrix per side.

    Upper side: psi'(0+) = G_plus psi(0+).  Lower side, with the inward
    normal: -psi'(0-) = G_minus psi(0-).  The inward orientation on the lower
    side is what makes the exponentially decaying pair states consistent on
    both sides simultaneously; with the plain derivative on both sides the
    two conditions would demand opposite eigenvalues of G.
    """

    G_plus: np.ndarray
    G_minus: np.ndarray

    def __post_init__(self):
        blocks = {}
        dim = None
        for name in ("G_plus", "G_minus"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
                raise ValidationError(f"{name} must be square, got {arr.shape}")
            if dim is None:
                dim = arr.shape[0]
            elif arr.shape[0] != dim:
                raise ValidationError(f"{name} has mismatched dimension")
            _require_hermitian(arr, name)
            arr = arr.copy()
            arr.setflags(write=False)
            blocks[name] = arr
        for name, arr in blocks.items():
            object.__setattr__(self, name, arr)

    @classmethod
    def uniform(cls, G) -> "SeparatedModel":
        """Same Hermitian matrix on both sides (the exactly solvable case)."""
        arr = np.asarray(G, dtype=complex)
        return cls(G_plus=arr, G_minus=arr.copy())

    @property
    def dim(self) -> int:
        return self.G_plus.shape[0]

    @property
    def is_uniform(self) -> bool:
        return _max_abs(self.G_plus - self.G_minus) < ALGEBRA_TOL
