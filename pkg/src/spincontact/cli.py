"""Command-line front end: model ingestion, checks, and deterministic reports.

Reports are key = value lines (``--format kv`` drops the spaces) with one
``verdict.<role>`` line per check; roles name the violated relation (YBE,
ABCD-1..3, continuity, jump, consistency, unitarity, symmetry, energy).
Reports contain no timestamps and all randomness flows through the seeded
generator in rng.py, so a fixed seed and model reproduce the output byte for
byte.  Exit status: 0 all verdicts pass, 1 any verdict failed, 2 input error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence

import numpy as np

from .bethe import boundary_residual, hyperplane_samples, propagate_coefficients
from .errors import (
    ModelFileError,
    PropagationError,
    SingularExchangeError,
    ValidationError,
)
from .models import (
    consistent_coupling,
    delta_bc,
    bound1_bc,
    bound2_bc,
    validate_block_bc,
    validate_coupling,
)
from .modelfile import ModelFile, parse_block_bc, parse_model, write_model
from .rng import Xoshiro256StarStar
from .spectra import (
    bound_state_boundary_residual,
    cluster_scattering_matrix,
    n_body_bound_states,
    s_element,
    scattering_matrix,
    separated_bound_states,
    separated_boundary_residual,
    symmetry_residual,
    unitarity_residual,
)
from .tensor_algebra import SpinConfig, Statistics
from .yang_baxter import MomentumSet, pair_exchange_matrix, ybe_residual

DEFAULT_TOL = 1e-10


class RawOutput:
    """Verbatim stdout payload (used by model-gen when emitting a model)."""

    def __init__(self, text: str):
        self.text = text
        self.failed = False

    def render(self, fmt: str = "text") -> str:
        return self.text


class Report:
    """Ordered key-value lines plus verdicts, rendered as text or kv."""

    def __init__(self, command: str):
        self._rows: List[tuple] = [("command", command)]
        self._failed = False

    @staticmethod
    def _format(value) -> str:
        if isinstance(value, bool):
            return "yes" if value else "no"
        if isinstance(value, float):
            return f"{value:.12e}"
        if isinstance(value, complex):
            return f"{value.real:.12e},{value.imag:.12e}"
        return str(value)

    def add(self, key: str, value) -> None:
        self._rows.append((key, self._format(value)))

    def verdict(self, role: str, passed: bool, residual: float, tol: float) -> None:
        self.add(f"residual.{role}", float(residual))
        self._rows.append((f"verdict.{role}", "PASS" if passed else "FAIL"))
        if not passed:
            self._failed = True

    @property
    def failed(self) -> bool:
        return self._failed

    def render(self, fmt: str = "text") -> str:
        sep = "=" if fmt == "kv" else " = "
        return "\n".join(f"{k}{sep}{v}" for k, v in self._rows) + "\n"


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _load_model(path: str) -> tuple:
    with open(path, "rb") as fh:
        data = fh.read()
    return parse_model(data.decode("utf-8")), _sha256(data)


def _parse_momenta(text: str, allow_complex: bool = False) -> List[complex]:
    out = []
    for token in text.split(","):
        token = token.strip()
        try:
            z = complex(token)
        except ValueError:
            raise ValidationError(f"bad momentum token {token!r}") from None
        if not allow_complex and z.imag != 0:
            raise ValidationError(f"momentum {token!r} must be real here")
        out.append(z)
    return out


def _parse_spins(text: str) -> tuple:
    if "," in text:
        return tuple(int(t) for t in text.split(","))
    return tuple(int(ch) for ch in text)


def _resolve_seed(args, model: Optional[ModelFile]) -> int:
    if args.seed is not None:
        return args.seed
    if model is not None:
        return model.seed
    return 0


# ---------------------------------------------------------------------------
# subcommands


def cmd_ybe_check(args) -> Report:
    model, digest = _load_model(args.model)
    rep = Report("ybe-check")
    rep.add("model.sha256", digest)
    rep.add("statistics", model.statistics.value)
    check = validate_coupling(model.coupling)
    rep.add("commutator.swap", check.commutator_residual)
    ncheck = max(model.N, 3)
    cfg = SpinConfig(N=ncheck, n=model.n, statistics=model.statistics)
    seed = _resolve_seed(args, model)
    if args.momenta:
        vals = [z.real for z in _parse_momenta(args.momenta)]
        if len(vals) != 3:
            raise ValidationError("ybe-check needs exactly three momenta")
        triples = [vals]
    elif args.grid:
        try:
            lo, hi, num = args.grid.split(":")
            axis = np.linspace(float(lo), float(hi), int(num))
        except ValueError:
            raise ValidationError(
                f"bad grid spec {args.grid!r}; expected lo:hi:num"
            ) from None
        triples = [
            (a, b, c)
            for a in axis
            for b in axis
            for c in axis
            if abs(a - b) > 1e-9 and abs(b - c) > 1e-9 and abs(a - c) > 1e-9
        ]
    else:
        gen = Xoshiro256StarStar(seed)
        triples = [
            gen.separated_reals(3, -2.0, 2.0, 0.05) for _ in range(args.random)
        ]
    rep.add("seed", seed)
    rep.add("sweep.points", len(triples))

    skipped = 0

    def one(triple):
        try:
            r = ybe_residual(cfg, model.coupling, triple)
            k12 = (triple[0] - triple[1]) / 2
            y_fwd = pair_exchange_matrix(model.coupling, k12, model.statistics)
            y_bwd = pair_exchange_matrix(model.coupling, -k12, model.statistics)
            inv = float(np.max(np.abs(y_fwd @ y_bwd - np.eye(model.n**2))))
            return r, inv
        except SingularExchangeError:
            return None

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, triples))
    else:
        results = [one(t) for t in triples]
    max_ybe = 0.0
    max_inv = 0.0
    for res in results:
        if res is None:
            skipped += 1
            continue
        max_ybe = max(max_ybe, res[0])
        max_inv = max(max_inv, res[1])
    rep.add("sweep.skipped", skipped)
    rep.add("residual.inverse.max", max_inv)
    rep.verdict("YBE", max_ybe < args.tol, max_ybe, args.tol)
    return rep


def cmd_bound_spectrum(args) -> Report:
    model, digest = _load_model(args.model)
    rep = Report("bound-spectrum")
    rep.add("model.sha256", digest)
    cfg = model.spin_config()
    seed = _resolve_seed(args, model)
    rep.add("seed", seed)
    gen = Xoshiro256StarStar(seed)
    modes = n_body_bound_states(cfg, model.coupling, a=model.a, c=model.c)
    if not modes:
        rep.add("bound_states", "none")
    else:
        families: dict = {}
        for mode in modes:
            families.setdefault(round(mode.lambda_val, 9), []).append(mode)
        rep.add("families", len(families))
        worst_energy = 0.0
        worst_boundary = 0.0
        for idx, lam in enumerate(sorted(families)):
            group = families[lam]
            mode = group[0]
            prefix = f"family.{idx}"
            rep.add(f"{prefix}.lambda", float(lam))
            rep.add(f"{prefix}.multiplicity", len(group))
            rep.add(f"{prefix}.kappa", mode.kappa)
            rep.add(f"{prefix}.energy", mode.energy)
            rep.add(f"{prefix}.momenta",
                    ";".join(Report._format(k) for k in mode.momenta.k))
            delta = abs(sum(k * k for k in mode.momenta.k) - mode.energy)
            rep.add(f"{prefix}.sumk2.delta", float(delta))
            worst_energy = max(worst_energy, float(delta))
            family_boundary = 0.0
            for (a_, b_) in [(i, j) for i in range(1, cfg.N + 1)
                             for j in range(i + 1, cfg.N + 1)]:
                samples = hyperplane_samples(cfg.N, (a_, b_), 5, gen.uniform)
                res = bound_state_boundary_residual(
                    cfg, model.coupling, mode, (a_, b_), samples
                )
                family_boundary = max(family_boundary, res.max)
            rep.add(f"{prefix}.boundary.max", family_boundary)
            worst_boundary = max(worst_boundary, family_boundary)
        rep.verdict("energy", worst_energy < 1e-12, worst_energy, 1e-12)
        rep.verdict("jump", worst_boundary < args.tol, worst_boundary, args.tol)
    if model.separated is not None:
        states = separated_bound_states(cfg, model.separated)
        if not states:
            rep.add("separated.bound_states", "none")
        else:
            groups: dict = {}
            for st in states:
                groups.setdefault(round(st.lambda_val, 9), []).append(st)
            worst_sep = 0.0
            for idx, lam in enumerate(sorted(groups)):
                block = groups[lam]
                prefix = f"separated.{idx}"
                rep.add(f"{prefix}.lambda", float(lam))
                rep.add(f"{prefix}.states", len(block))
                rep.add(f"{prefix}.energy", block[0].energy)
                for st in block:
                    for (a_, b_) in [(i, j) for i in range(1, cfg.N + 1)
                                     for j in range(i + 1, cfg.N + 1)]:
                        samples = hyperplane_samples(cfg.N, (a_, b_), 3, gen.uniform)
                        res = separated_boundary_residual(
                            cfg, model.separated, st, (a_, b_), samples
                        )
                        worst_sep = max(worst_sep, res.max)
            rep.verdict("separated", worst_sep < args.tol, worst_sep, args.tol)
    return rep


def cmd_smatrix(args) -> Report:
    model, digest = _load_model(args.model)
    rep = Report("smatrix")
    rep.add("model.sha256", digest)
    cfg = model.spin_config()
    if not args.momenta:
        raise ValidationError("smatrix requires --momenta")
    ks = MomentumSet([z.real for z in _parse_momenta(args.momenta)])
    S = scattering_matrix(cfg, model.coupling, ks)
    uni = unitarity_residual(S)
    sym = symmetry_residual(S)
    rep.verdict("unitarity", uni < args.tol, uni, args.tol)
    h = model.coupling.entries
    real_symmetric = float(np.max(np.abs(h.imag))) < 1e-12
    rep.add("coupling.real_symmetric", real_symmetric)
    if real_symmetric:
        rep.verdict("symmetry", sym < args.tol, sym, args.tol)
    else:
        rep.add("residual.symmetry", sym)
    if args.element:
        try:
            in_text, out_text = args.element.split(":")
        except ValueError:
            raise ValidationError(
                f"bad element spec {args.element!r}; expected in:out"
            ) from None
        value = s_element(S, _parse_spins(out_text), _parse_spins(in_text))
        rep.add("element", value)
    return rep


def cmd_cluster_smatrix(args) -> Report:
    model, digest = _load_model(args.model)
    rep = Report("cluster-smatrix")
    rep.add("model.sha256", digest)
    cfg = model.spin_config()
    if not args.clusters or "|" not in args.clusters:
        raise ValidationError("cluster-smatrix requires --clusters \"1,2|3,4,5\"")
    part_a, part_b = args.clusters.split("|", 1)
    cluster_a = [int(t) for t in part_a.split(",") if t.strip()]
    cluster_b = [int(t) for t in part_b.split(",") if t.strip()]
    if not args.momenta:
        raise ValidationError("cluster-smatrix requires --momenta")
    ks = MomentumSet(_parse_momenta(args.momenta, allow_complex=True))
    S = cluster_scattering_matrix(cfg, model.coupling, cluster_a, cluster_b, ks)
    rep.add("clusters", f"{cluster_a}|{cluster_b}")
    uni = unitarity_residual(S)
    all_real = all(k.imag == 0 for k in ks.k)
    if all_real:
        rep.verdict("unitarity", uni < args.tol, uni, args.tol)
    else:
        rep.add("residual.unitarity", uni)
        rep.add("unitarity.gated", False)
    return rep


def cmd_wavefunction_verify(args) -> Report:
    model, digest = _load_model(args.model)
    rep = Report("wavefunction-verify")
    rep.add("model.sha256", digest)
    if model.N > 6:
        raise ValidationError("wavefunction-verify is capped at N <= 6")
    cfg = model.spin_config()
    seed = _resolve_seed(args, model)
    rep.add("seed", seed)
    gen = Xoshiro256StarStar(seed)
    if args.momenta:
        ks = MomentumSet([z.real for z in _parse_momenta(args.momenta)])
        if len(ks) != cfg.N:
            raise ValidationError(f"need {cfg.N} momenta, got {len(ks)}")
    else:
        ks = MomentumSet(gen.separated_reals(cfg.N, -2.0, 2.0, 0.05))
    rep.add("momenta", ";".join(Report._format(k) for k in ks.k))
    u0 = np.array(
        [gen.uniform_in(-1, 1) + 1j * gen.uniform_in(-1, 1) for _ in range(cfg.dim)]
    )
    try:
        coeffs = propagate_coefficients(cfg, model.coupling, ks, u0)
    except PropagationError as exc:
        rep.add("consistency.failure", str(exc.permutation_pair))
        rep.verdict("consistency", False, float(exc.discrepancy), args.tol)
        return rep
    rep.verdict("consistency", coeffs.max_discrepancy < args.tol,
                coeffs.max_discrepancy, args.tol)
    bc = delta_bc(model.coupling)
    worst_cont = 0.0
    worst_jump = 0.0
    for a in range(1, cfg.N + 1):
        for b in range(a + 1, cfg.N + 1):
            samples = hyperplane_samples(cfg.N, (a, b), args.samples, gen.uniform)
            res = boundary_residual(coeffs, bc, (a, b), samples)
            rep.add(f"boundary.{a}{b}.continuity", res.continuity_max)
            rep.add(f"boundary.{a}{b}.jump", res.jump_max)
            worst_cont = max(worst_cont, res.continuity_max)
            worst_jump = max(worst_jump, res.jump_max)
    rep.verdict("continuity", worst_cont < args.tol, worst_cont, args.tol)
    rep.verdict("jump", worst_jump < args.tol, worst_jump, args.tol)
    return rep


def cmd_bc_validate(args) -> Report:
    rep = Report("bc-validate")
    if args.bc:
        with open(args.bc, "rb") as fh:
            data = fh.read()
        rep.add("bc.sha256", _sha256(data))
        bc = parse_block_bc(data.decode("utf-8"))
        rep.add("kind", "file")
    else:
        if not args.model:
            raise ValidationError("bc-validate needs --model or --bc")
        model, digest = _load_model(args.model)
        rep.add("model.sha256", digest)
        rep.add("kind", args.kind)
        h = model.coupling
        if args.kind == "delta":
            bc = delta_bc(h)
        elif args.kind == "bound1":
            bc = bound1_bc(h.entries)
        elif args.kind == "bound2":
            bc = bound2_bc(h.entries)
        else:
            raise ValidationError(f"unknown bc kind {args.kind!r}")
    check = validate_block_bc(bc)
    for idx, name in enumerate(("ABCD-1", "ABCD-2", "ABCD-3")):
        resid = check.residuals[idx]
        rep.verdict(name, resid < args.tol, resid, args.tol)
    return rep


def cmd_model_gen(args) -> Report:
    seed = args.seed if args.seed is not None else 0
    statistics = Statistics.from_string(args.statistics)
    gen = Xoshiro256StarStar(seed)
    d = args.n * args.n
    raw = gen.complex_matrix(d)
    herm = (raw + raw.conj().T) / 2
    scalar = gen.uniform_in(-2.0, 2.0)
    coupling = consistent_coupling(args.n, statistics, scalar, herm)
    model = ModelFile(
        n=args.n,
        N=args.N,
        statistics=statistics,
        coupling=coupling,
        spin_half_params=None,
        separated=None,
        a=1.0,
        c=0.0,
        seed=seed,
    )
    text = write_model(model)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        rep = Report("model-gen")
        rep.add("seed", seed)
        rep.add("out", args.out)
        rep.add("model.sha256", _sha256(text.encode("utf-8")))
        return rep
    return RawOutput(text)


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spincontact",
        description="Contact-interaction N-body model checks and spectra",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, model_required=True):
        if model_required:
            p.add_argument("--model", required=True, help="model file path")
        p.add_argument("--seed", type=int, default=None,
                       help="PRNG seed (defaults to the model file's seed)")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL,
                       help="verdict threshold")
        p.add_argument("--format", choices=("text", "kv"), default="text")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker threads for sweeps")

    p = sub.add_parser("ybe-check", help="spectral exchange-relation residuals")
    common(p)
    p.add_argument("--momenta", help="explicit momentum triple k1,k2,k3")
    p.add_argument("--grid", help="momentum grid lo:hi:num (tripled)")
    p.add_argument("--random", type=int, default=100,
                   help="number of random momentum triples")
    p.set_defaults(func=cmd_ybe_check)

    p = sub.add_parser("bound-spectrum", help="bound-state modes and energies")
    common(p)
    p.set_defaults(func=cmd_bound_spectrum)

    p = sub.add_parser("smatrix", help="scattering matrix checks")
    common(p)
    p.add_argument("--momenta", help="strictly increasing real momenta k1,k2,...")
    p.add_argument("--element", help="matrix element spec in:out, e.g. 12:21")
    p.set_defaults(func=cmd_smatrix)

    p = sub.add_parser("cluster-smatrix", help="two-cluster scattering matrix")
    common(p)
    p.add_argument("--momenta", help="momenta k1,k2,... (complex allowed)")
    p.add_argument("--clusters", help="partition spec, e.g. 1,2|3,4,5")
    p.set_defaults(func=cmd_cluster_smatrix)

    p = sub.add_parser("wavefunction-verify",
                       help="propagation consistency and boundary residuals")
    common(p)
    p.add_argument("--momenta", help="real momenta k1,k2,...")
    p.add_argument("--samples", type=int, default=50,
                   help="hyperplane sample points per pair")
    p.set_defaults(func=cmd_wavefunction_verify)

    p = sub.add_parser("bc-validate", help="boundary-condition block conditions")
    common(p, model_required=False)
    p.add_argument("--model", help="model file path")
    p.add_argument("--bc", help="boundary-condition file with blocks A,B,C,D")
    p.add_argument("--kind", choices=("delta", "bound1", "bound2"),
                   default="delta", help="constructor applied to the coupling")
    p.set_defaults(func=cmd_bc_validate)

    p = sub.add_parser("model-gen", help="emit a random solvable model file")
    common(p, model_required=False)
    p.add_argument("--n", type=int, default=2, help="local spin dimension")
    p.add_argument("--N", type=int, default=3, help="particle count")
    p.add_argument("--statistics", default="fermion",
                   help="boson or fermion")
    p.add_argument("--out", help="write the model here instead of stdout")
    p.set_defaults(func=cmd_model_gen)

    return parser


def run(argv: Optional[Sequence[str]] = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (ModelFileError, ValidationError, SingularExchangeError,
            FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out.write(report.render(args.format))
    return 1 if report.failed else 0


def main() -> None:
    sys.exit(run())
