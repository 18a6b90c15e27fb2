"""Command line interface: ``scinol synth|run|verify|bound|stats``.

Exit codes: 0 success, 1 I/O or parse failure, 2 usage or configuration
error, 3 a verification check exceeded its tolerance.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis.bounds import linearized_regret, theorem1_bound, theorem2_bound
from .analysis.history import RunHistory
from .analysis.verify import report_json, report_text, run_verification_suite
from .core import LOSS_NAMES
from .data.dataset import dataset_stats
from .data.formats import load_dataset
from .data.toy import ToySpec, write_toy
from .errors import ParseError, ScinolError, UndefinedFeatureError
from .harness import LEARNERS, ExperimentConfig, run_experiment, save_metrics

EXIT_IO = 1
EXIT_USAGE = 2
EXIT_VIOLATION = 3


class _UsageError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _grid(text):
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must look like 100x100, got {text!r}")


def _load_vector(path):
    """A comparator or rate vector: JSON list, or JSON object with key ``u``/``rates``."""
    with open(path) as fh:
        doc = json.load(fh)
    if isinstance(doc, dict):
        doc = doc.get("u", doc.get("rates"))
    return np.asarray(doc, dtype=np.float64)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="scinol", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="write the toy dataset as CSV plus a JSON sidecar")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--prefix", default="toy")
    s.add_argument("--d", type=int, default=21)
    s.add_argument("--n-train", type=int, default=5000)
    s.add_argument("--n-test", type=int, default=100_000)
    s.add_argument("--seed", type=int, default=0)

    r = sub.add_parser("run", help="train online and emit a metrics CSV")
    r.add_argument("--train", required=True)
    r.add_argument("--test", required=True)
    r.add_argument("--format", choices=("csv", "libsvm"), default=None)
    r.add_argument("--learner", choices=LEARNERS, default="scinol2")
    r.add_argument("--loss", choices=LOSS_NAMES, default="logistic")
    r.add_argument("--epsilon", type=float, default=1.0)
    r.add_argument("--eta", type=_float_list, default=None,
                   help="learning rate, or a comma-separated grid (one run each)")
    r.add_argument("--rates", help="JSON file of per-dimension rates for ogd")
    r.add_argument("--epochs", type=int, default=1)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--metric-every", type=int, default=50)
    r.add_argument("--reset-t-per-epoch", action="store_true")
    r.add_argument("--comparator", help="JSON file holding u; fills the cum_regret column")
    r.add_argument("--metrics", required=True, help="metrics CSV path")
    r.add_argument("--history", help="also write the run history JSON here")

    v = sub.add_parser("verify", help="numerically check the lemmas and recorded runs")
    v.add_argument("--grid", type=_grid, default=(100, 100), help="v x q grid, e.g. 100x100")
    v.add_argument("--random", type=int, default=10_000)
    v.add_argument("--conjugate", type=int, default=1_000)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--history", action="append", default=[], help="history JSON to replay")
    v.add_argument("--json", help="write the report JSON here")

    b = sub.add_parser("bound", help="regret bounds for a recorded run and comparator")
    b.add_argument("--history", required=True)
    b.add_argument("--comparator", required=True)
    b.add_argument("--epsilon", type=float, default=None)

    st = sub.add_parser("stats", help="features, records, classes and scale ratio")
    st.add_argument("path")
    st.add_argument("--format", choices=("csv", "libsvm"), default=None)
    return p


def _suffixed(path, eta, many):
    if not many:
        return Path(path)
    path = Path(path)
    return path.with_name(f"{path.stem}.eta{eta:g}{path.suffix}")


def cmd_synth(a):
    paths = write_toy(ToySpec(a.d, a.n_train, a.n_test, a.seed), a.out, a.prefix)
    for path in paths:
        print(path)
    return 0


def cmd_run(a):
    train = load_dataset(a.train, a.format)
    test = load_dataset(a.test, a.format)
    u = _load_vector(a.comparator) if a.comparator else None
    rates = _load_vector(a.rates).tolist() if a.rates else None
    etas = a.eta or [None]
    for eta in etas:
        cfg = ExperimentConfig(
            learner=a.learner, loss=a.loss, epsilon=a.epsilon, eta=eta, rates=rates,
            epochs=a.epochs, seed=a.seed, metric_every=a.metric_every,
            record_history=bool(a.history), reset_t_per_epoch=a.reset_t_per_epoch)
        rows, hist = run_experiment(cfg, train, test, u)
        many = len(etas) > 1
        out = _suffixed(a.metrics, eta, many)
        save_metrics(rows, out)
        print(out)
        if hist is not None:
            hpath = _suffixed(a.history, eta, many)
            hist.save(hpath)
            print(hpath)
    return 0


def cmd_verify(a):
    hists = [RunHistory.load(h) for h in a.history]
    n_v, n_q = a.grid
    results = run_verification_suite(n_v, n_q, a.random, a.conjugate, a.seed, hists)
    print(report_text(results))
    if a.json:
        with open(a.json, "w") as fh:
            fh.write(report_json(results))
    return 0 if all(r.passed for r in results) else EXIT_VIOLATION


def cmd_bound(a):
    hist = RunHistory.load(a.history)
    u = _load_vector(a.comparator).reshape(hist.cell_shape)
    out = {"learner": hist.learner, "T": hist.T, "linearized_regret": linearized_regret(hist, u),
           "theorem1_bound": theorem1_bound(u, hist, a.epsilon)}
    try:
        out["theorem2_bound"] = theorem2_bound(u, hist, a.epsilon)
    except UndefinedFeatureError:
        out["theorem2_bound"] = None
    print(json.dumps(out, indent=2))
    return 0


def cmd_stats(a):
    print(json.dumps(dataset_stats(load_dataset(a.path, a.format)), indent=2))
    return 0


COMMANDS = {"synth": cmd_synth, "run": cmd_run, "verify": cmd_verify, "bound": cmd_bound,
            "stats": cmd_stats}


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (OSError, ParseError, json.JSONDecodeError) as exc:
        print(f"scinol: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ScinolError, ValueError) as exc:
        print(f"scinol: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
