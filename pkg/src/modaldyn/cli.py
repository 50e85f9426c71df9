"""Batch command-line front end.

Subcommands: ``epistemic``, ``conditional``, ``sample``, ``verify-channel``.
Exit codes are a stable contract: 0 success, 2 configuration or parse
problems, 3 numerical invariant failures, 4 strict-mode degeneracy refusals,
5 channel verification failures. Outputs are deterministic: the same
configuration and seed produce byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import channels as channels_mod
from . import serialize
from .conditional import Partition, conditional_table
from .errors import (
    CptVerificationError,
    DegenerateBasisError,
    LayoutMismatchError,
    ModalDynError,
    UnknownLabelError,
)
from .scenarios import (
    Scenario,
    amplitude_damping_qubit,
    dephasing_qubit,
    epr_bohm,
    ghz_mermin,
    von_neumann_measurement,
)
from .serialize import SchemaError
from .states import DEFAULT_THRESHOLD, DensityMatrix, extract_epistemic
from .trajectories import TimeGrid, build_step_chain, run_ensemble

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_DEGENERATE = 4
EXIT_CHANNEL = 5

SEED_ENV_VAR = "MODALDYN_SEED"

_NAMED_RHO0 = {
    "plus": np.array([[0.5, 0.5], [0.5, 0.5]], dtype=complex),
    "zero": np.diag([1.0, 0.0]).astype(complex),
    "one": np.diag([0.0, 1.0]).astype(complex),
}


class ConfigError(ValueError):
    """Bad command-line configuration; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one CLI invocation."""

    command: str
    scenario: Optional[Scenario] = None
    scenario_label: str = ""
    subsystem: tuple[str, ...] = ()
    blocks: tuple[tuple[str, ...], ...] = ()
    time: float = 0.0
    duration: float = 0.0
    steps: int = 1
    n_samples: int = 1
    seed: Optional[int] = None
    mode: str = "strict"
    threshold: float = DEFAULT_THRESHOLD
    fmt: str = "json"
    output: Optional[str] = None
    channel_doc: Optional[dict] = None
    tol: float = 1e-9


def _parse_rho0(text: Optional[str]):
    if text is None:
        return None
    if text in _NAMED_RHO0:
        return _NAMED_RHO0[text]
    if text.startswith("diag:"):
        try:
            entries = [float(x) for x in text[len("diag:") :].split(",")]
        except ValueError as exc:
            raise ConfigError(f"cannot parse --rho0 {text!r}: {exc}") from exc
        if len(entries) != 2:
            raise ConfigError("--rho0 diag: expects two comma-separated weights")
        return np.diag(entries).astype(complex)
    raise ConfigError(
        f"unknown --rho0 {text!r}; use plus, zero, one, or diag:p0,p1"
    )


def _qubit_rho0(matrix: Optional[np.ndarray], factory) -> Scenario:
    if matrix is None:
        return factory(None)
    from .linalg import SystemLayout

    return factory(DensityMatrix(matrix, SystemLayout.qubits(("Q",))))


def _resolve_scenario(source: str, args: argparse.Namespace) -> Scenario:
    if source.endswith(".json") or os.path.isfile(source):
        try:
            with open(source, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read scenario file {source!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {source!r}: {exc}") from exc
        try:
            return serialize.scenario_from_document(data)
        except SchemaError as exc:
            raise ConfigError(f"bad scenario document {source!r}: {exc}") from exc
    rho0 = _parse_rho0(getattr(args, "rho0", None))
    gamma = float(getattr(args, "gamma", 1.0))
    if source == "epr-bohm":
        return epr_bohm()
    if source in ("ghz-mermin", "ghz"):
        return ghz_mermin()
    if source == "dephasing":
        return _qubit_rho0(rho0, lambda r: dephasing_qubit(gamma, r))
    if source == "damping":
        return _qubit_rho0(rho0, lambda r: amplitude_damping_qubit(gamma, r))
    if source == "von-neumann":
        alpha2 = float(getattr(args, "alpha2", 0.3))
        if not 0.0 <= alpha2 <= 1.0:
            raise ConfigError(f"--alpha2 must lie in [0, 1]: {alpha2}")
        return von_neumann_measurement(
            alpha=math.sqrt(alpha2),
            beta=math.sqrt(1.0 - alpha2),
            n_env=int(getattr(args, "n_env", 8)),
            coupling=float(getattr(args, "coupling", 0.4)),
        )
    raise ConfigError(
        f"unknown scenario {source!r}; names: epr-bohm, ghz-mermin, dephasing, "
        "damping, von-neumann, or a .json scenario file"
    )


def _parse_blocks(text: str) -> tuple[tuple[str, ...], ...]:
    blocks = []
    for chunk in text.split(","):
        labels = tuple(s.strip() for s in chunk.split("+") if s.strip())
        if not labels:
            raise ConfigError(f"empty block in --blocks {text!r}")
        blocks.append(labels)
    if not blocks:
        raise ConfigError("--blocks must name at least one block")
    return tuple(blocks)


def _resolve_seed(arg_seed: Optional[int]) -> int:
    if arg_seed is not None:
        return int(arg_seed)
    env = os.environ.get(SEED_ENV_VAR)
    if env is None:
        raise ConfigError(
            f"sampling needs --seed or the {SEED_ENV_VAR} environment variable"
        )
    try:
        return int(env)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV_VAR}={env!r} is not an integer") from exc


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


# ----------------------------------------------------------------- commands

def _cmd_epistemic(cfg: RunConfig) -> int:
    sc = cfg.scenario
    assert sc is not None
    state = sc.state_at(cfg.time)
    labels = cfg.subsystem or tuple(sc.layout.labels)
    if set(labels) != set(sc.layout.labels):
        state = state.reduce(labels)
    e = extract_epistemic(state, cfg.threshold)
    if cfg.fmt == "csv":
        text = serialize.epistemic_csv(e)
    else:
        text = serialize.dumps_json(
            serialize.epistemic_payload(
                e, cfg.scenario_label, tuple(labels), cfg.time
            )
        )
    _write(text, cfg.output)
    return EXIT_OK


def _table_channel(sc: Scenario, time: float):
    """Channel from t=0 to ``time`` plus an identifying string."""
    if sc.generator is not None and time > 0:
        return channels_mod.evolve(sc.generator, time), f"{sc.name}:lindblad"
    if sc.schedule:
        ch = sc.schedule[0]
        for nxt in sc.schedule[1:]:
            ch = channels_mod.compose(nxt, ch)
        return ch, f"{sc.name}:schedule"
    return None, "identity"


def _cmd_conditional(cfg: RunConfig) -> int:
    sc = cfg.scenario
    assert sc is not None
    try:
        part = Partition(sc.layout, cfg.blocks)
    except (LayoutMismatchError, UnknownLabelError) as exc:
        raise ConfigError(f"bad --blocks: {exc}") from exc
    channel, channel_id = _table_channel(sc, cfg.time)
    table = conditional_table(
        sc.initial_state,
        channel,
        part,
        mode=cfg.mode,
        threshold=cfg.threshold,
        times=(0.0, cfg.time),
        channel_id=channel_id,
    )
    if cfg.fmt == "csv":
        text = serialize.table_csv(table)
    else:
        text = serialize.dumps_json(serialize.table_payload(table, cfg.scenario_label))
    _write(text, cfg.output)
    return EXIT_OK


def _cmd_sample(cfg: RunConfig) -> int:
    sc = cfg.scenario
    assert sc is not None
    if sc.generator is None:
        raise ConfigError(
            f"scenario {cfg.scenario_label!r} has no generator dynamics to sample"
        )
    grid = TimeGrid(0.0, cfg.duration / cfg.steps, cfg.steps)
    chain = build_step_chain(
        sc.generator, sc.initial_state, grid, cfg.threshold, cfg.mode
    )
    seed = cfg.seed
    assert seed is not None
    if cfg.n_samples == 1:
        traj = chain.sample(seed)
        if cfg.fmt == "csv":
            text = serialize.trajectory_csv(traj)
        else:
            text = serialize.dumps_json(
                serialize.trajectory_payload(traj, cfg.scenario_label)
            )
    else:
        report = run_ensemble(
            sc.generator,
            sc.initial_state,
            grid,
            cfg.n_samples,
            seed,
            cfg.threshold,
            cfg.mode,
            chain=chain,
        )
        if cfg.fmt == "csv":
            text = serialize.ensemble_csv(report)
        else:
            text = serialize.dumps_json(
                serialize.ensemble_payload(report, cfg.scenario_label)
            )
    _write(text, cfg.output)
    return EXIT_OK


def _cmd_verify_channel(cfg: RunConfig) -> int:
    doc = cfg.channel_doc
    assert doc is not None
    kind = doc["kind"]
    try:
        if kind == "kraus":
            report = channels_mod.verify_kraus_operators(doc["operators"], cfg.tol)
        elif kind == "unitary":
            report = channels_mod.verify_kraus_operators([doc["matrix"]], cfg.tol)
        elif kind == "superoperator":
            report = channels_mod.verify_superoperator_matrix(
                doc["matrix"], doc["dim"], cfg.tol
            )
        else:  # lindblad
            gen = channels_mod.LindbladGenerator(
                hamiltonian=doc["hamiltonian"], jumps=tuple(doc["jumps"])
            )
            ch = channels_mod.evolve(gen, doc["duration"])
            report = channels_mod.verify_cpt(ch, cfg.tol)
    except ModalDynError as exc:
        sys.stderr.write(f"channel rejected: {exc}\n")
        return EXIT_CHANNEL
    payload = {
        "schema_version": serialize.SCHEMA_VERSION,
        "kind": "cpt_report",
        "channel_kind": kind,
        "dim": int(doc["dim"]),
        "tol": float(cfg.tol),
        "is_cp": report.is_cp,
        "is_tp": report.is_tp,
        "choi_min_eigenvalue": report.choi_min_eigenvalue,
        "completeness_residual": report.completeness_residual,
    }
    if cfg.fmt == "csv":
        lines = [f"# schema_version: {serialize.SCHEMA_VERSION}", "field,value"]
        for key in sorted(payload):
            lines.append(f"{key},{payload[key]}")
        text = "\n".join(lines) + "\n"
    else:
        text = serialize.dumps_json(payload)
    _write(text, cfg.output)
    return EXIT_OK if (report.is_cp and report.is_tp) else EXIT_CHANNEL


# ------------------------------------------------------------------ parsing

def _add_common(p: argparse.ArgumentParser, with_mode: bool) -> None:
    p.add_argument("--output", "-o", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument(
        "--threshold",
        type=float,
        default=DEFAULT_THRESHOLD,
        help="eigenvalue retention threshold",
    )
    if with_mode:
        p.add_argument(
            "--mode",
            choices=("strict", "permissive"),
            default="strict",
            help="degeneracy policy",
        )


def _add_scenario_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--scenario",
        required=True,
        help="scenario name or path to a scenario .json file",
    )
    p.add_argument("--gamma", type=float, default=1.0, help="jump rate")
    p.add_argument(
        "--rho0", default=None, help="initial qubit state: plus, zero, one, diag:p0,p1"
    )
    p.add_argument("--alpha2", type=float, default=0.3, help="|alpha|^2 (von-neumann)")
    p.add_argument("--n-env", dest="n_env", type=int, default=8)
    p.add_argument("--coupling", type=float, default=0.4)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modaldyn",
        description=(
            "Spectral epistemic states, conditional probabilities, trajectory "
            "sampling, and channel verification for finite quantum systems."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_epi = sub.add_parser("epistemic", help="eigenvalues/eigenstates of a subsystem")
    _add_scenario_args(p_epi)
    p_epi.add_argument(
        "--subsystem", default=None, help="comma-separated factor labels (default all)"
    )
    p_epi.add_argument("--time", type=float, default=0.0)
    _add_common(p_epi, with_mode=False)

    p_cond = sub.add_parser("conditional", help="conditional probability table")
    _add_scenario_args(p_cond)
    p_cond.add_argument(
        "--blocks",
        required=True,
        help="partition blocks, e.g. 'A,B' or 'A+B,C' (labels joined by +)",
    )
    p_cond.add_argument("--time", type=float, default=0.0)
    _add_common(p_cond, with_mode=True)

    p_samp = sub.add_parser("sample", help="sample ontic trajectories")
    _add_scenario_args(p_samp)
    p_samp.add_argument("--t", type=float, required=True, help="total duration")
    p_samp.add_argument("--steps", type=int, required=True, help="grid steps")
    p_samp.add_argument("--n", type=int, default=1, help="number of trajectories")
    p_samp.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"base seed (falls back to {SEED_ENV_VAR})",
    )
    _add_common(p_samp, with_mode=True)

    p_ver = sub.add_parser("verify-channel", help="CPT verification report")
    p_ver.add_argument("--channel", required=True, help="channel .json file")
    p_ver.add_argument("--tol", type=float, default=1e-9)
    _add_common(p_ver, with_mode=False)

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    common = dict(
        mode=getattr(args, "mode", "strict"),
        threshold=float(args.threshold),
        fmt=args.format,
        output=args.output,
    )
    if args.command == "verify-channel":
        try:
            with open(args.channel, "r", encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read channel file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"malformed JSON in {args.channel!r}: {exc}") from exc
        try:
            doc = serialize.load_channel_document(data)
        except SchemaError as exc:
            raise ConfigError(f"bad channel document: {exc}") from exc
        return RunConfig(
            command=args.command, channel_doc=doc, tol=float(args.tol), **common
        )

    scenario = _resolve_scenario(args.scenario, args)
    if args.command == "epistemic":
        subsystem = ()
        if args.subsystem:
            subsystem = tuple(
                s.strip() for s in args.subsystem.split(",") if s.strip()
            )
            unknown = set(subsystem) - set(scenario.layout.labels)
            if unknown:
                raise ConfigError(
                    f"--subsystem labels {sorted(unknown)} not in layout "
                    f"{scenario.layout.labels}"
                )
        return RunConfig(
            command=args.command,
            scenario=scenario,
            scenario_label=args.scenario,
            subsystem=subsystem,
            time=float(args.time),
            **common,
        )
    if args.command == "conditional":
        return RunConfig(
            command=args.command,
            scenario=scenario,
            scenario_label=args.scenario,
            blocks=_parse_blocks(args.blocks),
            time=float(args.time),
            **common,
        )
    # sample
    if args.t <= 0:
        raise ConfigError(f"--t must be positive: {args.t}")
    if args.steps < 1:
        raise ConfigError(f"--steps must be >= 1: {args.steps}")
    if args.n < 1:
        raise ConfigError(f"--n must be >= 1: {args.n}")
    return RunConfig(
        command=args.command,
        scenario=scenario,
        scenario_label=args.scenario,
        duration=float(args.t),
        steps=int(args.steps),
        n_samples=int(args.n),
        seed=_resolve_seed(args.seed),
        **common,
    )


_DISPATCH = {
    "epistemic": _cmd_epistemic,
    "conditional": _cmd_conditional,
    "sample": _cmd_sample,
    "verify-channel": _cmd_verify_channel,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _config_from_args(args)
        return _DISPATCH[cfg.command](cfg)
    except ConfigError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG
    except DegenerateBasisError as exc:
        sys.stderr.write(f"degeneracy refusal: {exc}\n")
        return EXIT_DEGENERATE
    except CptVerificationError as exc:
        sys.stderr.write(f"channel verification failure: {exc}\n")
        return EXIT_CHANNEL
    except IndexError as exc:
        sys.stderr.write(f"index error: {exc}\n")
        return EXIT_CONFIG
    except ModalDynError as exc:
        sys.stderr.write(f"numerical invariant failure: {exc}\n")
        return EXIT_NUMERIC
    except ValueError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
