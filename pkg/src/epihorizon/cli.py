"""Command-line front end.

Exit status 0 covers findings such as "infeasible" or "invalid chain"; exit
status 2 means the input could not be read or parsed.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import context_reasoner as cr
from . import lhv_bell as lb
from . import observable_algebra as oa
from . import quantum_engine as qe
from . import toy_states as ts

SUBCOMMANDS = ("diagonal", "toy-sim", "bell", "hardy", "fr", "epr", "validate")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    subcommand: str
    input_path: Optional[Path] = None
    seed: Optional[int] = None
    output_format: str = "table"
    correlations: Optional[str] = None
    settings: Optional[str] = None
    alpha: str = "negation"
    state_path: Optional[Path] = None
    info_bound: int = 2


def _read(path: Path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None


def _load_json(path: Path):
    text = _read(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _frac_str(p: Fraction) -> dict:
    return {"exact": str(p), "decimal": float(p)}


def _approx(p: float) -> dict:
    return {"approx_rational": str(Fraction(p).limit_denominator(1000)), "decimal": round(p, 15)}


# --- subcommand bodies: each returns (json payload, table lines) ------------

def _diagonal(cfg: RunConfig):
    if cfg.input_path is None:
        raise InputError("diagonal needs a table file")
    try:
        table = oa.MeasurementTable.parse(_read(cfg.input_path))
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"{cfg.input_path}: {exc}") from None
    if not table.is_square:
        raise InputError(f"{cfg.input_path}: table is {table.n_measurements}x{table.n_states}, "
                         "the diagonal needs a square table")
    alphas = {"negation": oa.NEGATION, "identity": oa.IDENTITY,
              "plus": oa.constant(1), "minus": oa.constant(-1)}
    g = oa.diagonal_measurement(table)
    match = oa.find_matching_row(table, g)
    report = oa.lawvere_check(table, alphas[cfg.alpha])
    payload = {
        "size": table.n_states,
        "diagonal": [int(v) for v in table.diagonal()],
        "diagonal_measurement": [int(v) for v in g.outcomes],
        "matching_row": match,
        "lawvere": {"alpha": cfg.alpha, "g": [int(v) for v in report.g],
                    "fixed_points": [int(v) for v in report.fixed_points],
                    "matching_rows": list(report.matching_rows),
                    "contradiction": report.contradiction},
    }
    lines = [
        f"table: {table.n_measurements} measurements x {table.n_states} states",
        "diagonal:             " + "".join(v.symbol() for v in table.diagonal()),
        "diagonal measurement: " + str(g),
        "matching row:         " + (str(match) if match is not None else "none"),
        f"lawvere ({cfg.alpha}): " + report.summary(),
    ]
    return payload, lines


def _toy_sim(cfg: RunConfig):
    if cfg.input_path is None:
        raise InputError("toy-sim needs --script")
    data = _load_json(cfg.input_path)
    if isinstance(data, list):
        data = {"measurements": data}
    if not isinstance(data, dict) or not isinstance(data.get("measurements"), list):
        raise InputError(f"{cfg.input_path}: script needs a 'measurements' list")
    init = data.get("initial", "entangled")
    try:
        if init == "entangled":
            state = ts.entangled_state()
        elif isinstance(init, dict):
            state = ts.EpistemicState.from_dict(init)
        else:
            raise ts.DomainError(f"unknown initial state {init!r}")
        observables = [ts.ObservableId.parse(o) for o in data["measurements"]]
    except (ts.DomainError, KeyError, TypeError) as exc:
        raise InputError(f"{cfg.input_path}: {exc}") from None
    rng = np.random.default_rng(cfg.seed if cfg.seed is not None else 0)
    records = []
    for i, o in enumerate(observables, start=1):
        try:
            rec = ts.measure(state, o, rng)
        except ts.DomainError as exc:
            raise InputError(f"{cfg.input_path}: measurement {i}: {exc}") from None
        records.append(dict(step=i, **rec.to_dict()))
        state = rec.post_state
    lines = [f"{r['step']:>3} {r['observable']:<5} -> {'+' if r['outcome'] > 0 else '-'}"
             f"{' (forced)' if r['forced'] else ''}  "
             f"{ts.EpistemicState.from_dict(r['post_state'])}" for r in records]
    return records, lines


def _bell(cfg: RunConfig):
    if (cfg.input_path is None) == (cfg.correlations is None):
        raise InputError("bell needs exactly one of --model or --correlations")
    if cfg.input_path is not None:
        data = _load_json(cfg.input_path)
        try:
            model = lb.HiddenVariableModel(data)
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise InputError(f"{cfg.input_path}: {exc}") from None
        margs = {f"{o}={s}": _frac_str(lb.marginal(model, {o: v}))
                 for o in lb.OBSERVABLES for s, v in (("+1", 1), ("-1", -1))}
        exps = {f"<{a} {b}>": _frac_str(lb.expectation(model, (a, b))) for a, b in lb.PAIRS}
        c = lb.chsh(model)
        f1, f2 = lb.chsh_closed_forms(model)
        payload = {"mode": "model", "marginals": margs, "expectations": exps,
                   "chsh": _frac_str(c), "closed_forms": [str(f1), str(f2)]}
        lines = [f"P({k}) = {v['exact']} ({v['decimal']:.6f})" for k, v in margs.items()]
        lines += [f"{k} = {v['exact']} ({v['decimal']:.6f})" for k, v in exps.items()]
        lines.append(f"CHSH = {c} ({float(c):.6f}); closed forms {f1}, {f2}")
        return payload, lines

    try:
        parts = [Fraction(p.strip()) for p in cfg.correlations.split(",")]
        cs = lb.CorrelationSet.of(parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--correlations: {exc}") from None
    witness = lb.feasible(cs)
    variants = lb.chsh_variants(cs)
    payload = {"mode": "correlations", "correlations": [str(v) for v in cs.as_tuple()],
               "chsh": _frac_str(cs.chsh()),
               "max_abs_chsh_variant": _frac_str(max(abs(v) for v in variants)),
               "feasible": witness is not None,
               "witness": witness.to_json_list() if witness is not None else None}
    lines = [f"correlations <xx>,<xz>,<zx>,<zz> = {', '.join(str(v) for v in cs.as_tuple())}",
             f"CHSH = {cs.chsh()} ({float(cs.chsh()):.6f}); "
             f"largest |variant| = {max(abs(v) for v in variants)}"]
    if witness is None:
        lines.append("infeasible: no hidden-variable model reproduces these correlations")
    else:
        lines.append("feasible; witness model:")
        lines += [f"  p_{i:<2} = {p}" for i, p in enumerate(witness.probabilities, start=1) if p]
    return payload, lines


def _load_state(cfg: RunConfig) -> qe.QubitPairState:
    if cfg.state_path is None:
        return qe.hardy_state()
    data = _load_json(cfg.state_path)
    try:
        return qe.QubitPairState.from_dict(data)
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{cfg.state_path}: {exc}") from None


def _ket(basis, i: int) -> str:
    sa, sb = ("+", "+", "-", "-")[i], ("+", "-", "+", "-")[i]
    return f"|{basis[0]}_A^{sa} {basis[1]}_B^{sb}>"


def _hardy(cfg: RunConfig):
    state = _load_state(cfg)
    pairs = [(qe.Z, qe.Z), (qe.X, qe.X), (qe.X, qe.Z), (qe.Z, qe.X)]
    if cfg.settings:
        try:
            extra = qe._basis_pair(cfg.settings)
        except ValueError as exc:
            raise InputError(f"--settings: {exc}") from None
        if extra not in pairs:
            pairs.append(extra)
    expansions, lines = [], []
    for pair in pairs:
        amps = qe.change_basis(state, pair).amplitudes
        dist = qe.born(state, pair)
        terms = []
        for i, a in enumerate(amps):
            terms.append({"ket": _ket(pair, i), "amplitude": [float(a.real), float(a.imag)],
                          "probability": _approx(dist.probabilities[i])})
        expansions.append({"basis": [str(b) for b in pair], "terms": terms})
        lines.append(f"basis {pair[0]}{pair[1]}:")
        for t in terms:
            re, im = (0.0 if abs(v) < 5e-7 else v for v in t["amplitude"])
            amp = f"{re:+.6f}" if abs(im) < 1e-15 else f"{re:+.6f}{im:+.6f}i"
            lines.append(f"  {t['ket']:<18} {amp}   P = {t['probability']['approx_rational']}"
                         f" ({t['probability']['decimal']:.6f})")
    p_h = qe.born(state, (qe.X, qe.X)).p(-1, -1)
    payload = {"expansions": expansions, "p_H": _approx(p_h)}
    lines.append(f"p_H = P(x_A^-, x_B^-) = {_approx(p_h)['approx_rational']} ({p_h:.12f})")
    return payload, lines


def _demo(fn):
    def run(cfg: RunConfig):
        trace = fn()
        return trace.to_dict(), trace.lines
    return run


def _validate(cfg: RunConfig):
    if cfg.input_path is None:
        raise InputError("validate needs --chain")
    data = _load_json(cfg.input_path)
    try:
        chain, bound = cr.parse_chain(data)
    except ts.DomainError as exc:
        raise InputError(f"{cfg.input_path}: {exc}") from None
    if cfg.info_bound != 2:
        bound = cfg.info_bound
    state = _load_state(cfg)
    try:
        step_verdicts = [cr.validate_step(s, state) for s in chain.steps]
        verdict = cr.validate_chain(chain, state, bound)
    except ts.DomainError as exc:
        raise InputError(f"{cfg.input_path}: {exc}") from None
    payload = {"steps": [dict(s.to_dict(), verdict=v.to_dict())
                         for s, v in zip(chain.steps, step_verdicts)],
               "fused_conclusion": str(chain.fused_conclusion), "info_bound": bound,
               "verdict": verdict.to_dict()}
    lines = [f"step {s.id}: {s.conclusion} -> {'valid' if v.valid else 'invalid: ' + v.detail}"
             for s, v in zip(chain.steps, step_verdicts)]
    if verdict.valid:
        lines.append(f"chain valid: {chain.fused_conclusion}")
    else:
        lines.append(f"chain invalid ({', '.join(verdict.violation.reasons)}): {verdict.detail}")
    return payload, lines


HANDLERS = {
    "diagonal": _diagonal,
    "toy-sim": _toy_sim,
    "bell": _bell,
    "hardy": _hardy,
    "fr": _demo(cr.fr_demo),
    "epr": _demo(cr.epr_demo),
    "validate": _validate,
}


def run(cfg: RunConfig, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        payload, lines = HANDLERS[cfg.subcommand](cfg)
    except InputError as exc:
        print(f"error: {exc}", file=err)
        return 2
    if cfg.output_format == "json":
        if cfg.subcommand == "toy-sim":
            for rec in payload:
                out.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            out.write(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    else:
        out.write("\n".join(lines) + "\n")
    return 0


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=None, help="RNG seed (toy-sim default 0)")
    common.add_argument("--output-format", choices=("table", "json"), default="table")

    p = argparse.ArgumentParser(prog="epihorizon", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True)

    d = sub.add_parser("diagonal", parents=[common], help="diagonal measurement of a table")
    d.add_argument("table", type=Path, help="+/- grid or JSON matrix of 1/-1")
    d.add_argument("--alpha", choices=("negation", "identity", "plus", "minus"), default="negation")

    t = sub.add_parser("toy-sim", parents=[common], help="run a toy measurement script")
    t.add_argument("--script", type=Path, required=True)

    b = sub.add_parser("bell", parents=[common], help="LHV model report or correlation feasibility")
    b.add_argument("--model", type=Path)
    b.add_argument("--correlations", help="<xx>,<xz>,<zx>,<zz> as rationals or decimals")

    h = sub.add_parser("hardy", parents=[common], help="Hardy state expansions and p_H")
    h.add_argument("--settings", help="basis pair such as x,z or 0.785,z")
    h.add_argument("--state", type=Path)

    sub.add_parser("fr", parents=[common], help="Frauchiger-Renner chain demo")
    sub.add_parser("epr", parents=[common], help="EPR counterfactual demo")

    v = sub.add_parser("validate", parents=[common], help="check a user inference chain")
    v.add_argument("--chain", type=Path, required=True)
    v.add_argument("--state", type=Path)
    v.add_argument("--info-bound", type=int, default=2)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(subcommand=args.subcommand, seed=args.seed, output_format=args.output_format)
    if args.subcommand == "diagonal":
        cfg.input_path, cfg.alpha = args.table, args.alpha
    elif args.subcommand == "toy-sim":
        cfg.input_path = args.script
    elif args.subcommand == "bell":
        cfg.input_path, cfg.correlations = args.model, args.correlations
    elif args.subcommand == "hardy":
        cfg.settings, cfg.state_path = args.settings, args.state
    elif args.subcommand == "validate":
        cfg.input_path, cfg.state_path, cfg.info_bound = args.chain, args.state, args.info_bound
    return run(cfg)


if __name__ == "__main__":
    raise SystemExit(main())
