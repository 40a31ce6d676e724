"""Command-line front end: ``solve``, ``simulate``, ``sweep`` and ``verify``.

Exit codes: 0 success, 1 other solver error, 2 bad configuration or
arguments, 3 infeasible instance, 4 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import bcd, checks
from .config import ConfigError, RunConfig, parse_config
from .errors import InfeasibleError, InvalidArgumentError, PabaError
from .simulator import AXES, DEFAULT_SCHEMES, LearningCoupling, build_instance, run_rounds, sweep
from .solvers import solve

EXIT_OK, EXIT_ERROR, EXIT_CONFIG, EXIT_INFEASIBLE, EXIT_VERIFY = 0, 1, 2, 3, 4


def parse_values(text: str) -> list[float]:
    """``a,b,c`` | ``a..b`` (7 evenly spaced points) | ``a..b:step``."""
    text = text.strip()
    try:
        if ".." in text:
            lo, rest = text.split("..", 1)
            hi, _, step = rest.partition(":")
            lo, hi = float(lo), float(hi)
            if step:
                step = float(step)
                if step <= 0:
                    raise ValueError
                n = int(np.floor((hi - lo) / step + 1e-9)) + 1
                return [lo + i * step for i in range(n)]
            return [float(v) for v in np.linspace(lo, hi, 7)]
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError("--values", f"cannot parse {text!r}") from None


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    return path


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_solve(cfg: RunConfig, args) -> int:
    inst = build_instance(cfg.scenario, 0, 0)
    alloc = solve(cfg.scheme, inst, cfg.solver)
    out = {"scheme": cfg.scheme, "config": cfg.to_dict(), "allocation": alloc.to_dict()}
    path = _write(Path(cfg.out_dir), "allocation.json", _dump(out))
    print(f"{cfg.scheme}: round latency {alloc.round_latency_s:.6g} s, "
          f"sum b = {int(np.sum(alloc.block_lens))}, "
          f"sum rho = {sum(float(np.sum(r)) for r in alloc.bw_ratios):.12f} -> {path}")
    return EXIT_OK


def _learning(cfg: RunConfig):
    lc = cfg.learning
    if lc.dataset_path:
        data = bcd.load_libsvm(lc.dataset_path, lc.total_params)
    else:
        data = bcd.make_synthetic(lc.n_samples, lc.total_params, lc.density, lc.data_seed, lc.loss)
    test = bcd.load_libsvm(lc.test_path, lc.total_params) if lc.test_path else None
    task = bcd.LearningTask(lc.loss, lc.reg, lc.reg_weight, lc.step_size)
    return LearningCoupling(task, data, test, lc.data_seed)


def cmd_simulate(cfg: RunConfig, args) -> int:
    scenario = cfg.scenario
    learning = None
    if cfg.learning.enabled:
        learning = _learning(cfg)
        scenario = replace(scenario, total_params=learning.dataset.dimension,
                           total_samples=max(learning.dataset.n_samples, scenario.workers_per_group))
    trace = run_rounds(scenario, cfg.scheme, cfg.rounds, 0, cfg.solver, learning)
    out = {"config": cfg.to_dict(), "trace": trace.to_dict()}
    path = _write(Path(cfg.out_dir), "trace.json", _dump(out))
    if trace.latencies:
        print(f"{cfg.scheme}: {len(trace.latencies)} rounds, total latency {trace.total_latency:.6g} s -> {path}")
    if trace.aborted:
        print(f"aborted: {trace.aborted}", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, args) -> int:
    if args.axis is None:
        raise ConfigError("--axis", f"required; one of {sorted(AXES)}")
    if args.values is None:
        raise ConfigError("--values", "required")
    values = parse_values(args.values)
    schemes = args.schemes.split(",") if args.schemes else list(DEFAULT_SCHEMES)
    res = sweep(cfg.scenario, args.axis, values, cfg.draws, schemes, cfg.solver, cfg.processes)
    path = _write(Path(cfg.out_dir), f"sweep_{args.axis}.csv", res.to_csv())
    print(res.to_csv(), end="")
    print(f"-> {path}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(cfg: RunConfig, args) -> int:
    results = checks.run_checks(args.suite, args.seeds, cfg.scenario.seed)
    print(checks.format_table(results))
    rows = [
        {"property": r.name, "suite": r.suite, "seeds": r.seeds, "failures": r.failures,
         "worst": r.worst, "tol": r.tol, "passed": r.passed, "error": r.error}
        for r in results
    ]
    _write(Path(cfg.out_dir), f"verify_{args.suite}.json", _dump(rows))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


COMMANDS = {"solve": cmd_solve, "simulate": cmd_simulate, "sweep": cmd_sweep, "verify": cmd_verify}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field (repeatable)")
    common.add_argument("--seed", type=int, help="master random seed")
    common.add_argument("--out-dir", help="directory for artifacts")
    common.add_argument("--scheme", help="allocation scheme")

    p = _Parser(prog="paba", description="Joint parameter and bandwidth allocation for partitioned edge learning.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("solve", parents=[common], help="solve one instance")
    sim = sub.add_parser("simulate", parents=[common], help="multi-round run, optional learning")
    sim.add_argument("--rounds", type=int)
    sw = sub.add_parser("sweep", parents=[common], help="Monte-Carlo latency sweep")
    sw.add_argument("--axis", choices=sorted(AXES))
    sw.add_argument("--values", help="a,b,c | a..b | a..b:step")
    sw.add_argument("--draws", type=int)
    sw.add_argument("--schemes", help="comma-separated scheme list")
    sw.add_argument("--processes", type=int)
    ver = sub.add_parser("verify", parents=[common], help="randomised property checks")
    ver.add_argument("--suite", choices=checks.SUITES, default="all")
    ver.add_argument("--seeds", type=int, default=20)
    return p


def _config_from_args(args) -> RunConfig:
    extra = {"out_dir": args.out_dir, "scheme": args.scheme,
             "rounds": getattr(args, "rounds", None), "draws": getattr(args, "draws", None),
             "processes": getattr(args, "processes", None)}
    items = list(args.set)
    items += [(k, v) for k, v in extra.items() if v is not None]
    return parse_config(args.config, items, args.seed)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if getattr(args, "seeds", 1) < 1:
            raise ConfigError("--seeds", "must be >= 1")
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except InvalidArgumentError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PabaError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
