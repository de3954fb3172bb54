"""Command-line front end.

    stimclone evolve          ladder amplitudes f_l(t) and p(l) on a time grid
    stimclone fidelity-table  F_l (optimal formula and simulated) with p(l)
    stimclone sweep           mean clone number over (t, N, m) grids
    stimclone verify [SUITE]  cross-model verification, JSON report on stdout

Exit codes: 0 success, 1 verification failure, 2 configuration error,
3 resource ceiling exceeded.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import analysis, ladder, lambda_atoms, oscillator, verify, vsystem
from .errors import ResourceError
from .fock import DENSE_THRESHOLD, StateVector, evolve_many
from .serialize import canonical_json, write_csv

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_RESOURCE = 0, 1, 2, 3
MODELS = ("ladder", "lambda", "osc", "osc1", "vpair", "classical-pump", "generalized")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    model: str = "ladder"
    N: tuple[int, ...] = (1,)
    m: tuple[int, ...] = (1,)
    gamma: float = 1.0
    times: tuple[float, ...] = (0.0,)
    pol: tuple[complex, complex] = (1 + 0j, 0j)
    fmt: str = "json"
    out: str | None = None
    seed: int = 7
    dense_threshold: int = DENSE_THRESHOLD
    r: int = 2
    max_dim: int | None = None
    suite: str = "all"

    def validate(self) -> "RunConfig":
        if self.model not in MODELS:
            raise ConfigError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        if not self.times:
            raise ConfigError("time grid is empty")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise ConfigError("time grid must be strictly increasing")
        if any(n < 0 for n in self.N) or any(x < 0 for x in self.m):
            raise ConfigError("N and m must be non-negative")
        if not self.gamma > 0:
            raise ConfigError("gamma must be positive")
        if self.fmt not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.r < 2:
            raise ConfigError("r must be at least 2")
        return self

    @property
    def polarization(self) -> analysis.Polarization:
        a, b = self.pol
        nrm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
        if nrm == 0:
            raise ConfigError("polarization vector is zero")
        return analysis.Polarization(a / nrm, b / nrm)

    @property
    def single_N(self) -> int:
        if len(self.N) != 1:
            raise ConfigError("this command takes a single N")
        return self.N[0]

    @property
    def single_m(self) -> int:
        if len(self.m) != 1:
            raise ConfigError("this command takes a single m")
        return self.m[0]


# -- parsing ---------------------------------------------------------------


def parse_grid(text, kind=float) -> tuple:
    """Comma list ``"0,0.5,1"`` or inclusive range ``"start:stop:step"``."""
    if isinstance(text, (list, tuple)):
        return tuple(kind(x) for x in text)
    if isinstance(text, (int, float)):
        return (kind(text),)
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3 or parts[2] <= 0:
                raise ConfigError(f"bad range {text!r}; expected start:stop:step with step > 0")
            start, stop, step = parts
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [start + i * step for i in range(max(count, 0))]
            return tuple(kind(round(v)) if kind is int else kind(v) for v in values)
        return tuple(kind(p) for p in text.split(",") if p.strip())
    except ValueError as exc:
        raise ConfigError(f"cannot parse {text!r}: {exc}") from None


def parse_pol(text) -> tuple[complex, complex]:
    if isinstance(text, (list, tuple)):
        vals = [float(x) for x in text]
    else:
        try:
            vals = [float(x) for x in str(text).split(",")]
        except ValueError:
            raise ConfigError(f"cannot parse polarization {text!r}") from None
    if len(vals) != 4:
        raise ConfigError("polarization needs four numbers: re,im,re,im")
    return complex(vals[0], vals[1]), complex(vals[2], vals[3])


_CONFIG_KEYS = {
    "model": ("model", str),
    "N": ("N", lambda v: parse_grid(v, int)),
    "m": ("m", lambda v: parse_grid(v, int)),
    "gamma": ("gamma", float),
    "t": ("times", parse_grid),
    "times": ("times", parse_grid),
    "pol": ("pol", parse_pol),
    "format": ("fmt", str),
    "out": ("out", str),
    "seed": ("seed", int),
    "dense_threshold": ("dense_threshold", int),
    "r": ("r", int),
    "max_dim": ("max_dim", int),
}


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    out = {}
    for key, value in data.items():
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        name, conv = _CONFIG_KEYS[key]
        out[name] = conv(value)
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration; flags override it")
    common.add_argument("--model", choices=MODELS)
    common.add_argument("--n", help="atom number N (or pair count for vpair); lists/ranges for sweep")
    common.add_argument("--m", help="input photon number m; lists/ranges for sweep")
    common.add_argument("--gamma", type=float)
    common.add_argument("--t", help="time grid: comma list or start:stop:step")
    common.add_argument("--pol", help="input polarization as re,im,re,im")
    common.add_argument("--format", dest="fmt", choices=("json", "csv"))
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="seed for random polarization sampling")
    common.add_argument("--dense-threshold", type=int, help="largest dimension diagonalized densely")
    common.add_argument("--r", type=int, help="ground states for the generalized model")
    common.add_argument("--max-dim", type=int, help="basis dimension ceiling")

    parser = argparse.ArgumentParser(prog="stimclone", description="Stimulated-emission cloning simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("evolve", parents=[common], help="ladder amplitudes f_l(t)",
                   description="One record per (t, l): re/im of f_l and p(l).")
    sub.add_parser("fidelity-table", parents=[common], help="F_l and p(l) for l = 0..N",
                   description="Columns: t, l, F (optimal formula), F_measured (simulated, "
                               "relative to --pol), p.")
    sub.add_parser("sweep", parents=[common], help="mean clone number over (t, N, m)",
                   description="CSV columns: t, N, m, mean_clones, mean_clones_closed_form "
                               "(N sin^2(gamma sqrt(m) t)), avg_fidelity (p-weighted F_l).")
    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suite", nargs="?", default="all", choices=sorted(verify.SUITES) + ["all"])
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = load_config(args.config) if args.config else {}
    flags = {
        "model": args.model,
        "N": None if args.n is None else parse_grid(args.n, int),
        "m": None if args.m is None else parse_grid(args.m, int),
        "gamma": args.gamma,
        "times": None if args.t is None else parse_grid(args.t),
        "pol": None if args.pol is None else parse_pol(args.pol),
        "fmt": args.fmt,
        "out": args.out,
        "seed": args.seed,
        "dense_threshold": args.dense_threshold,
        "r": args.r,
        "max_dim": args.max_dim,
    }
    values.update({k: v for k, v in flags.items() if v is not None})
    if getattr(args, "suite", None):
        values["suite"] = args.suite
    return replace(RunConfig(), **values).validate()


# -- model runs -------------------------------------------------------------


def _dims(cfg: RunConfig):
    tensor = cfg.max_dim or lambda_atoms.TENSOR_DIM_LIMIT
    osc = cfg.max_dim or oscillator.OSC_DIM_LIMIT
    return tensor, osc


def _project(states: Sequence[StateVector], N: int, m: int) -> list[np.ndarray]:
    basis = ladder.hampd_basis(N, m)
    F = ladder.ladder_matrix(N, m, basis)
    out = []
    for s in states:
        s = s if s.basis is basis else _reexpress(s, basis)
        out.append(F.conj().T @ s.amplitudes)
    return out


def _reexpress(psi, basis):
    from .fock import reexpress

    return reexpress(psi, basis, tol=1e-12)


def ladder_amplitudes(cfg: RunConfig) -> list[tuple[float, np.ndarray]]:
    """``(t, f)`` pairs for the configured model; ``f`` may be None (p only)."""
    N, m, g, times = cfg.single_N, cfg.single_m, cfg.gamma, cfg.times
    tensor_dim, osc_dim = _dims(cfg)
    if cfg.model == "ladder":
        return [(c.t, c.amplitudes) for c in ladder.evolve_ladder_many(N, m, g, times)]
    if cfg.model == "osc":
        basis, H = oscillator.build_hampd(oscillator.OscillatorModelSpec(m=m, N=N, gamma=g), max_dim=osc_dim)
        states = evolve_many(H, oscillator.initial_state(basis, N, m), times, cfg.dense_threshold)
        return list(zip(times, _project(states, N, m)))
    if cfg.model == "osc1":
        basis, H = oscillator.build_hampd1(oscillator.OscillatorModelSpec(m=m, N=N, gamma=g), max_dim=osc_dim)
        target = ladder.hampd_basis(N, m)
        states = evolve_many(H, oscillator.initial_state(basis, N, m), times, cfg.dense_threshold)
        return list(zip(times, _project([oscillator.relabel_state(s, target) for s in states], N, m)))
    if cfg.model == "lambda":
        if N < 1:
            raise ConfigError("lambda model needs N >= 1")
        H, psi0 = lambda_atoms.lambda_model(N, m, g, max_dim=tensor_dim)
        target = ladder.hampd_basis(N, m)
        states = evolve_many(H, psi0, times, cfg.dense_threshold)
        mapped = [lambda_atoms.map_to_oscillator(s, N, oscillator.universal_basis(N, m)) for s in states]
        return list(zip(times, _project([_reexpress(s, target) for s in mapped], N, m)))
    if cfg.model == "vpair":
        if N < 1:
            raise ConfigError("vpair model needs N >= 1 pairs")
        H, psi0 = vsystem.v_model(N, m, g, max_dim=tensor_dim)
        uni = oscillator.universal_basis(N, m)
        out = []
        for t, s in zip(times, evolve_many(H, psi0, times, cfg.dense_threshold)):
            lam = vsystem.pair_substitution_map(s, N)
            out.append(lambda_atoms.map_to_oscillator(lam, N, uni))
        return list(zip(times, _project(out, N, m)))
    raise ConfigError(f"model {cfg.model} has no ladder amplitudes")


def _records(cfg: RunConfig) -> list[dict]:
    recs = []
    if cfg.model == "classical-pump":
        res = oscillator.converged_classical_pump(cfg.gamma, cfg.single_m, cfg.times)
        for t, probs in zip(cfg.times, res.probabilities):
            for l, p in enumerate(probs):
                recs.append({"t": t, "l": l, "re": None, "im": None, "p": float(p)})
        return recs
    if cfg.model == "generalized":
        N, m = cfg.single_N, cfg.single_m
        photons = (m,) + (0,) * (cfg.r - 1)
        basis, H = oscillator.build_generalized(N, photons, cfg.gamma, max_dim=_dims(cfg)[1])
        psi0 = oscillator.generalized_initial_state(basis, N, photons)
        b_modes = tuple(f"b{n}" for n in range(1, cfg.r + 1))
        for t, s in zip(cfg.times, evolve_many(H, psi0, cfg.times, cfg.dense_threshold)):
            for l, p in enumerate(oscillator.pair_populations(s, b_modes, max_pairs=N)):
                recs.append({"t": t, "l": l, "re": None, "im": None, "p": float(p)})
        return recs
    for t, f in ladder_amplitudes(cfg):
        for l, a in enumerate(f):
            recs.append({"t": float(t), "l": l, "re": float(a.real), "im": float(a.imag), "p": float(abs(a) ** 2)})
    return recs


def cmd_evolve(cfg: RunConfig) -> str:
    recs = _records(cfg)
    if cfg.fmt == "csv":
        return write_csv(["t", "l", "re", "im", "p"], [[r["t"], r["l"], r["re"], r["im"], r["p"]] for r in recs])
    doc = {"model": cfg.model, "N": cfg.single_N, "m": cfg.single_m, "gamma": cfg.gamma, "records": recs}
    return canonical_json(doc)


def cmd_fidelity_table(cfg: RunConfig) -> str:
    N, m = cfg.single_N, cfg.single_m
    if m < 1:
        raise ConfigError("fidelity needs m >= 1")
    pol = cfg.polarization
    basis = oscillator.universal_basis(N, m)
    if len(basis) > _dims(cfg)[1]:
        raise ResourceError(f"oscillator basis dimension {len(basis)} exceeds limit")
    _, H = oscillator.build_hampd(oscillator.OscillatorModelSpec(m=m, N=N, gamma=cfg.gamma), basis=basis)
    psi0 = oscillator.polarized_input(basis, N, m, pol.alpha, pol.beta)
    rows = []
    for t, psi in zip(cfg.times, evolve_many(H, psi0, cfg.times, cfg.dense_threshold)):
        sectors = analysis.sector_fidelities(psi, pol)
        for l in range(N + 1):
            rows.append({
                "t": float(t),
                "l": l,
                "F": float(ladder.fidelity_formula(m, l)),
                "F_measured": sectors.fidelities.get(l, math.nan),
                "p": sectors.probabilities.get(l, 0.0),
            })
    if cfg.fmt == "csv":
        cols = ["t", "l", "F", "F_measured", "p"]
        return write_csv(cols, [[r[c] for c in cols] for r in rows])
    return canonical_json({"N": N, "m": m, "gamma": cfg.gamma, "pol": [[pol.alpha.real, pol.alpha.imag], [pol.beta.real, pol.beta.imag]], "rows": rows})


SWEEP_COLUMNS = ["t", "N", "m", "mean_clones", "mean_clones_closed_form", "avg_fidelity"]


def sweep_rows(cfg: RunConfig) -> list[list]:
    rows = []
    for N in cfg.N:
        for m in cfg.m:
            if N + 1 > _dims(cfg)[1]:
                raise ResourceError(f"ladder dimension {N + 1} exceeds limit")
            for f in ladder.evolve_ladder_many(N, m, cfg.gamma, cfg.times):
                stats = ladder.clone_number_distribution(f)
                avg = float(np.dot(stats.p, stats.fidelities)) if m >= 1 else math.nan
                closed = ladder.mean_clones_closed_form(N, m, cfg.gamma, f.t)
                rows.append([float(f.t), N, m, stats.mean_clones, closed, avg])
    return rows


def cmd_sweep(cfg: RunConfig) -> str:
    rows = sweep_rows(cfg)
    if cfg.fmt == "json":
        return canonical_json({"columns": SWEEP_COLUMNS, "rows": rows})
    return write_csv(SWEEP_COLUMNS, rows)


def cmd_verify(cfg: RunConfig) -> tuple[str, list[verify.CheckReport]]:
    if cfg.suite in ("universality", "all"):
        suites = dict(verify.SUITES)
        suites["universality"] = lambda: verify.suite_universality(seed=cfg.seed)
    else:
        suites = verify.SUITES
    names = list(suites) if cfg.suite == "all" else [cfg.suite]
    reports = [r for name in names for r in suites[name]()]
    doc = {"suite": cfg.suite, "pass": all(r.passed for r in reports), "checks": [r.to_json() for r in reports]}
    return canonical_json(doc), reports


def _emit(text: str, out: str | None):
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        if args.command == "verify":
            text, reports = cmd_verify(cfg)
            _emit(text, cfg.out)
            for r in reports:
                print(r.line(), file=sys.stderr)
            failed = [r.check for r in reports if not r.passed]
            if failed:
                print(f"{len(failed)} check(s) failed: {'; '.join(failed)}", file=sys.stderr)
                return EXIT_FAIL
            print(f"all {len(reports)} checks passed", file=sys.stderr)
            return EXIT_OK
        handler = {"evolve": cmd_evolve, "fidelity-table": cmd_fidelity_table, "sweep": cmd_sweep}[args.command]
        _emit(handler(cfg), cfg.out)
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
