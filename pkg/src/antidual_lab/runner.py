"""Batch experiment runner: JSON config in, CSV trace and JSON summary out.

    antidual-lab pip --config cfg.json --out results/
    antidual-lab validate --config cfg.json

Config schema (numbers that must be exact may be given as decimal strings;
complex values as Python literals such as "1+2j")::

    {
      "space": {"default_weight": "1", "weights": {"3": "0.25"}},
      "functionals": {
        "xi":  {"kind": "power_law", "exponent": "1", "scale": "1", "tail": "integral"},
        "ev":  {"kind": "constant", "value": "1", "mask": {"kind": "even"}},
        "v":   {"kind": "embed", "vector": {"1": "1", "2": "1"}},
        "fin": {"kind": "finite", "coeffs": {"1": "3", "2": "4"}},
        "alt": {"kind": "alternating", "scale": "1"},
        "ind": {"kind": "indicator", "set": {"kind": "residue", "modulus": 3, "residues": [0]}},
        "s":   {"kind": "sum", "terms": [["1", "xi"], ["0.5j", "fin"]]}
      },
      "chain": {"kind": "prefix" | "split", "X": {...}, "schedule": [1, 1], "steps": 10000},
      "task": "trace" | "pip" | "norm" | "radius" | "interval" | "witness" | "split-contrast",
      "xi": "xi", "eta": "ev", "functional": "xi",
      "x": {"1": "1"}, "y": {"2": "1"},
      "k": 5, "samples": 10000,
      "tol": "1e-8", "window": 8,
      "outputs": {"csv": "trace.csv", "json": "summary.json", "csv_stride": 1}
    }

Index sets: {"kind": "even"}, {"kind": "odd"}, {"kind": "finite", "members": [...]},
{"kind": "cofinite", "excluded": [...]}, {"kind": "residue", "modulus": m, "residues": [...]}.

Tail bounds: "exact" (finite support, computed), "integral" (power law with
exponent > 1/2: |scale|^2 n^(1-2s)/((2s-1) min w)), or
{"kind": "power", "c": C, "p": P} meaning n -> C n^(-P).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import chains as ch
from . import witnesses as wt
from .errors import AntidualError, BudgetExhausted
from .functionals import (
    Alternating,
    Antifunctional,
    Constant,
    FiniteSupport,
    Indicator,
    PowerLaw,
    Sum,
    embed,
    mask,
    operator_norm_estimate,
    power_law_tail,
)
from .indexsets import IndexSet
from .space import Vector, WeightedSpace

__all__ = ["ConfigError", "BudgetError", "TASKS", "validate", "run", "main"]

TASKS = ("trace", "pip", "norm", "radius", "interval", "witness", "split-contrast")
KINDS = ("finite", "embed", "constant", "power_law", "alternating", "indicator", "sum")


class ConfigError(AntidualError, ValueError):
    pass


class BudgetError(AntidualError, RuntimeError):
    pass


def _num(v: Any) -> float:
    return float(v)


def _cnum(v: Any) -> complex:
    return complex(v.replace(" ", "")) if isinstance(v, str) else complex(v)


# -- validation ---------------------------------------------------------------


def _check_indexset(d: Any, where: str, out: list[str]) -> None:
    if not isinstance(d, dict) or "kind" not in d:
        out.append(f"{where}: index set needs a 'kind'")
        return
    kind = d["kind"]
    if kind in ("even", "odd"):
        return
    if kind == "finite":
        members = d.get("members")
        if not isinstance(members, list) or any(not isinstance(i, int) or i < 1 for i in members):
            out.append(f"{where}: finite index set needs 'members', a list of integers >= 1")
    elif kind == "cofinite":
        excl = d.get("excluded", [])
        if not isinstance(excl, list) or any(not isinstance(i, int) or i < 1 for i in excl):
            out.append(f"{where}: 'excluded' must be a list of integers >= 1")
    elif kind == "residue":
        m = d.get("modulus")
        if not isinstance(m, int) or m < 1:
            out.append(f"{where}: residue set needs a positive integer 'modulus'")
        if not isinstance(d.get("residues"), list):
            out.append(f"{where}: residue set needs a 'residues' list")
    else:
        out.append(f"{where}: unknown index set kind {kind!r}")


def _check_vector(d: Any, where: str, out: list[str]) -> None:
    if not isinstance(d, dict):
        out.append(f"{where}: vector must be an object mapping index to coefficient")
        return
    for i, c in d.items():
        try:
            if int(i) < 1:
                raise ValueError
        except ValueError:
            out.append(f"{where}: bad basis index {i!r}")
        try:
            _cnum(c)
        except (TypeError, ValueError):
            out.append(f"{where}: bad coefficient {c!r}")


def _check_number(cfg: dict, key: str, where: str, out: list[str], complex_ok: bool = False) -> None:
    if key not in cfg:
        return
    try:
        (_cnum if complex_ok else _num)(cfg[key])
    except (TypeError, ValueError):
        out.append(f"{where}: bad number for {key!r}: {cfg[key]!r}")


def validate(config: dict) -> list[str]:
    """Every problem with ``config``, without running anything."""
    out: list[str] = []
    if not isinstance(config, dict):
        return ["config must be a JSON object"]

    space = config.get("space", {})
    try:
        if _num(space.get("default_weight", 1)) <= 0:
            out.append("weights must be strictly positive")
        for i, w in space.get("weights", {}).items():
            if int(i) < 1:
                out.append(f"space: bad basis index {i!r}")
            if _num(w) <= 0:
                out.append(f"weights must be strictly positive (index {i})")
    except (TypeError, ValueError, AttributeError):
        out.append("space: malformed weight specification")

    funcs = config.get("functionals", {})
    if not isinstance(funcs, dict):
        out.append("functionals must be an object")
        funcs = {}
    for name, f in funcs.items():
        where = f"functional {name!r}"
        if not isinstance(f, dict):
            out.append(f"{where}: must be an object")
            continue
        kind = f.get("kind")
        if kind not in KINDS:
            out.append(f"{where}: unknown kind {kind!r}")
            continue
        if kind == "finite":
            _check_vector(f.get("coeffs"), where, out)
        elif kind == "embed":
            _check_vector(f.get("vector"), where, out)
        elif kind == "indicator":
            _check_indexset(f.get("set"), where, out)
        elif kind == "sum":
            terms = f.get("terms")
            if not isinstance(terms, list) or not terms:
                out.append(f"{where}: sum needs a nonempty 'terms' list")
            else:
                for t in terms:
                    if not (isinstance(t, list) and len(t) == 2):
                        out.append(f"{where}: each term is [coefficient, name]")
                        continue
                    try:
                        _cnum(t[0])
                    except (TypeError, ValueError):
                        out.append(f"{where}: bad term coefficient {t[0]!r}")
                    if t[1] not in funcs:
                        out.append(f"{where}: unknown functional {t[1]!r}")
                    elif t[1] == name:
                        out.append(f"{where}: refers to itself")
        for key in ("value", "scale"):
            _check_number(f, key, where, out, complex_ok=True)
        _check_number(f, "exponent", where, out)
        if "mask" in f:
            _check_indexset(f["mask"], f"{where} mask", out)
        tail = f.get("tail")
        if tail is not None:
            if tail == "integral":
                try:
                    ok = kind == "power_law" and _num(f.get("exponent", 1)) > 0.5
                except (TypeError, ValueError):
                    ok = False
                if not ok:
                    out.append(f"{where}: 'integral' tail needs a power law with exponent > 1/2")
            elif tail == "exact":
                if kind not in ("finite", "embed"):
                    out.append(f"{where}: 'exact' tail only applies to finite support")
            elif isinstance(tail, dict) and tail.get("kind") == "power":
                try:
                    if _num(tail["c"]) < 0 or _num(tail["p"]) < 0:
                        out.append(f"{where}: power tail needs c >= 0 and p >= 0")
                except (KeyError, TypeError, ValueError):
                    out.append(f"{where}: power tail needs numbers 'c' and 'p'")
            else:
                out.append(f"{where}: unknown tail {tail!r}")

    task = config.get("task")
    if task not in TASKS:
        out.append(f"unknown task {task!r}")

    chain = config.get("chain", {"kind": "prefix"})
    if chain.get("kind", "prefix") not in ("prefix", "split"):
        out.append(f"chain: unknown kind {chain.get('kind')!r}")
    if chain.get("kind") == "split" or task == "split-contrast":
        _check_indexset(chain.get("X"), "chain X", out)
        sched = chain.get("schedule", [1, 1])
        if not (isinstance(sched, list) and len(sched) == 2 and all(isinstance(s, int) and s >= 0 for s in sched)
                and sum(sched) > 0):
            out.append("chain: schedule must be two nonnegative integers, not both zero")
    steps = chain.get("steps", ch.DEFAULT_STEPS)
    if not isinstance(steps, int) or steps < 1:
        out.append("chain: step budget must be an integer >= 1")

    need: tuple[str, ...] = ()
    if task in ("trace", "pip", "witness", "split-contrast"):
        need = ("xi", "eta")
    elif task == "norm":
        need = ("functional",)
    for key in need:
        if key not in config:
            out.append(f"task {task!r} needs {key!r}")
        elif config[key] not in funcs:
            out.append(f"unknown functional name {config[key]!r} for {key!r}")
    if task in ("radius", "interval"):
        for key in ("x", "y"):
            if key not in config:
                out.append(f"task {task!r} needs vector {key!r}")
            else:
                _check_vector(config[key], key, out)

    if "tol" in config:
        try:
            if _num(config["tol"]) <= 0:
                out.append("tol must be positive")
        except (TypeError, ValueError):
            out.append(f"bad number for 'tol': {config['tol']!r}")
    for key in ("window", "k", "samples"):
        if key in config and (not isinstance(config[key], int) or config[key] < 0):
            out.append(f"{key!r} must be a nonnegative integer")
    stride = config.get("outputs", {}).get("csv_stride", 1)
    if not isinstance(stride, int) or stride < 1:
        out.append("outputs.csv_stride must be an integer >= 1")
    return out


# -- construction ---------------------------------------------------------------


def _indexset(d: dict) -> IndexSet:
    kind = d["kind"]
    if kind == "even":
        return IndexSet.even()
    if kind == "odd":
        return IndexSet.odd()
    if kind == "finite":
        return IndexSet.finite(d["members"])
    if kind == "cofinite":
        return IndexSet.cofinite(d.get("excluded", []))
    s = IndexSet.residue(d["modulus"], d["residues"])
    if d.get("flips"):
        s = IndexSet._make(s.modulus, s.residues, d["flips"])
    return s


def _vector(d: dict) -> Vector:
    return Vector({int(i): _cnum(c) for i, c in d.items()})


def build_space(config: dict) -> WeightedSpace:
    sp = config.get("space", {})
    return WeightedSpace(_num(sp.get("default_weight", 1)),
                         {int(i): _num(w) for i, w in sp.get("weights", {}).items()})


def build_functionals(config: dict, space: WeightedSpace) -> dict[str, Antifunctional]:
    specs = config.get("functionals", {})
    built: dict[str, Antifunctional] = {}

    def make(name: str, stack: tuple[str, ...] = ()) -> Antifunctional:
        if name in built:
            return built[name]
        if name in stack:
            raise ConfigError(f"functional {name!r} is defined in terms of itself")
        f = specs[name]
        kind = f["kind"]
        tail = _tail(f, space)
        if kind == "finite":
            z = FiniteSupport({int(i): _cnum(c) for i, c in f["coeffs"].items()}, tail_bound=tail)
        elif kind == "embed":
            z = embed(space, _vector(f["vector"]))
            if tail is not None:
                z = FiniteSupport(dict(z.coeffs), tail_bound=tail)
        elif kind == "constant":
            z = Constant(_cnum(f.get("value", 1)), tail_bound=tail)
        elif kind == "power_law":
            z = PowerLaw(_num(f.get("exponent", 1)), _cnum(f.get("scale", 1)), tail_bound=tail)
        elif kind == "alternating":
            z = Alternating(_cnum(f.get("scale", 1)), tail_bound=tail)
        elif kind == "indicator":
            z = Indicator(_indexset(f["set"]), _cnum(f.get("value", 1)), tail_bound=tail)
        else:
            z = Sum(tuple((_cnum(a), make(n, stack + (name,))) for a, n in f["terms"]), tail_bound=tail)
        if "mask" in f:
            z = mask(z, _indexset(f["mask"]))
        built[name] = z
        return z

    for name in specs:
        make(name)
    return built


def _tail(f: dict, space: WeightedSpace):
    tail = f.get("tail")
    if tail is None or tail == "exact":
        return None
    if tail == "integral":
        return power_law_tail(_num(f.get("exponent", 1)), _cnum(f.get("scale", 1)), space.min_weight)
    c, p = _num(tail["c"]), _num(tail["p"])
    return lambda n: c * np.asarray(n, dtype=float) ** (-p)


def build_chain(config: dict) -> ch.SubspaceChain:
    chain = config.get("chain", {"kind": "prefix"})
    if chain.get("kind", "prefix") == "split":
        return ch.SubspaceChain.split(_indexset(chain["X"]), tuple(chain.get("schedule", [1, 1])))
    return ch.SubspaceChain.prefix()


# -- output -------------------------------------------------------------------


def _g17(x: float) -> str:
    return format(x, ".17g")


def write_trace_csv(path: Path, trace: ch.Trace, stride: int = 1) -> None:
    rows = list(trace.rows())
    keep = set(range(0, len(rows), stride)) | ({len(rows) - 1} if rows else set())
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["step", "dim", "re", "im", "bound"])
        for j in sorted(keep):
            k, dim, re, im, b = rows[j]
            w.writerow([k, dim, _g17(re), _g17(im), "" if b is None or np.isnan(b) else _g17(b)])


def _cjson(z: complex | None):
    return None if z is None else {"re": float(z.real), "im": float(z.imag)}


def _outcome_json(o: ch.EvaluationOutcome) -> dict:
    d = {
        "verdict": o.verdict.value,
        "value": _cjson(o.value),
        "error_bound": o.error_bound,
        "certified": o.certified,
        "steps": len(o.trace),
        "final_dim": int(o.trace.dims[-1]) if len(o.trace) else 0,
    }
    if o.certificate is not None:
        d["certificate"] = o.certificate.to_json()
    return d


def _vec_json(v: Vector) -> dict:
    return {"support": list(v.support), "re": [v[i].real for i in v.support], "im": [v[i].imag for i in v.support]}


# -- tasks ----------------------------------------------------------------------


def run(config: dict, out_dir: str | Path, *, seed: int | None = None, steps: int | None = None,
        tol: float | None = None) -> dict:
    """Run one experiment; writes the CSV trace(s) and JSON summary into ``out_dir``."""
    problems = validate(config)
    if problems:
        raise ConfigError("; ".join(problems))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = config.get("outputs", {})
    csv_name = outputs.get("csv", "trace.csv")
    json_name = outputs.get("json", "summary.json")
    stride = outputs.get("csv_stride", 1)

    space = build_space(config)
    funcs = build_functionals(config, space)
    budget = steps if steps is not None else config.get("chain", {}).get("steps", ch.DEFAULT_STEPS)
    tol = tol if tol is not None else _num(config.get("tol", 1e-8))
    window = config.get("window", 8)
    seed = seed if seed is not None else config.get("seed", 0)
    chain = build_chain(config)
    task = config["task"]
    summary: dict[str, Any] = {"task": task}

    if task == "trace":
        xi, eta = funcs[config["xi"]], funcs[config["eta"]]
        w = ch.walk(space, chain, budget)
        w.ensure(w.budget)
        s = w.cross(xi, eta)
        trace = ch.Trace(w.dims.copy(), s, ch._pair_bounds(space, xi, eta, w.prefix))
        write_trace_csv(out_dir / csv_name, trace, stride)
        summary.update({"steps": len(s), "last": _cjson(complex(s[-1])) if len(s) else None})

    elif task == "pip":
        xi, eta = funcs[config["xi"]], funcs[config["eta"]]
        o = ch.partial_inner_product(space, xi, eta, chain, tol, window, budget,
                                     certify_divergence=config.get("k", 0))
        write_trace_csv(out_dir / csv_name, o.trace, stride)
        summary.update(_outcome_json(o))

    elif task == "norm":
        zeta = funcs[config["functional"]]
        est = operator_norm_estimate(space, zeta, chain, budget, tol, window)
        trace = ch.Trace(est.dims, est.norms.astype(complex))
        write_trace_csv(out_dir / csv_name, trace, stride)
        summary.update({"verdict": est.verdict.value, "value": est.value, "error": est.error,
                        "exponent": est.exponent, "steps": est.steps})

    elif task == "radius":
        x, y = _vector(config["x"]), _vector(config["y"])
        u, value = wt.numerical_radius_witness(space, x, y)
        summary.update({"value": value, "u": _vec_json(u)})

    elif task == "interval":
        x, y = _vector(config["x"]), _vector(config["y"])
        lo, hi = wt.real_range_interval(space, x, y)
        samples = wt.sample_real_range(space, x, y, config.get("samples", 10_000), np.random.default_rng(seed))
        (vmin, _), (vmax, _) = wt.real_range_extremes(space, x, y)
        summary.update({"interval": [lo, hi], "sample_min": float(samples.min()),
                        "sample_max": float(samples.max()), "attained": [vmin, vmax],
                        "samples": len(samples), "seed": seed})

    elif task == "witness":
        xi, eta = funcs[config["xi"]], funcs[config["eta"]]
        cert = _certificate(space, xi, eta, config.get("k", 5))
        write_trace_csv(out_dir / csv_name, _certificate_trace(space, cert, xi, eta), stride)
        valid = not wt.check_certificate(space, cert, xi, eta)
        summary.update({"certificate": cert.to_json(), "valid": valid,
                        "verdict": ch.Verdict.DIVERGED.value if valid else ch.Verdict.INCONCLUSIVE.value})

    elif task == "split-contrast":
        xi, eta = funcs[config["xi"]], funcs[config["eta"]]
        X = _indexset(config["chain"]["X"])
        o = ch.split_partial_inner_product(space, xi, eta, X, tol, budget,
                                           tuple(config["chain"].get("schedule", [1, 1])), window)
        cert = _certificate(space, xi, eta, config.get("k", 5))
        write_trace_csv(out_dir / "trace_split.csv", o.trace, stride)
        write_trace_csv(out_dir / "trace_certificate.csv", _certificate_trace(space, cert, xi, eta), 1)
        summary.update({"split": _outcome_json(o), "certificate": cert.to_json(),
                        "valid": not wt.check_certificate(space, cert, xi, eta)})

    with open(out_dir / json_name, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary


def _certificate(space, xi, eta, k):
    try:
        return wt.divergence_certificate(space, xi, eta, None, k)
    except BudgetExhausted as exc:
        raise BudgetError(str(exc)) from exc


def _certificate_trace(space, cert, xi, eta) -> ch.Trace:
    """<xi_N|eta_N> along base ⊂ N_1 ⊂ N_2 ... (jumps accumulate)."""
    from .functionals import riesz_restrict
    from .space import inner_product

    s0 = inner_product(space, riesz_restrict(space, xi, cert.base), riesz_restrict(space, eta, cert.base))
    vals = s0 + np.cumsum([s.jump for s in cert.steps]) if cert.steps else np.zeros(0, dtype=complex)
    dims = np.arange(cert.base.dim + 1, cert.base.dim + 1 + len(cert.steps))
    return ch.Trace(dims, np.asarray(vals, dtype=complex))


# -- command line ------------------------------------------------------------------


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="antidual-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in TASKS + ("validate",):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", type=Path, default=Path("."))
        p.add_argument("--seed", type=int)
        p.add_argument("--steps", type=int)
        p.add_argument("--tol", type=float)
    args = parser.parse_args(argv)

    try:
        config = json.loads(args.config.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        problems = validate(config)
        for p in problems:
            print(p)
        return 1 if problems else 0

    config = dict(config, task=args.command)
    try:
        summary = run(config, args.out, seed=args.seed, steps=args.steps, tol=args.tol)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (BudgetError, AntidualError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    verdict = summary.get("verdict") or summary.get("split", {}).get("verdict") or "done"
    print(f"{args.command}: {verdict}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
