"""``driftscan`` command line: detect, generate, evaluate, sweep.

Trace indices in all outputs are 0-based: a drift reported at ``i`` means the
trace at position ``i`` is the first one after the confirmed change.

Exit codes: 0 success, 1 internal error, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .detector import DetectorConfig, detect
from .evaluation import CSV_COLUMNS, GroundTruth, classify, default_epsilon
from .event_log import read_log
from .exceptions import DriftScanError
from .loggen import BUILTIN_MODELS, PATTERNS, generate_entry, write_entry
from .petri_net import DEFAULT_REPLAY_BUDGET
from .process_tree import parse_tree

__all__ = ["RunManifest", "main", "build_parser", "replay_budget_from_env"]

BUDGET_ENV = "DRIFTSCAN_REPLAY_BUDGET"

logger = logging.getLogger("driftscan")


class InputError(Exception):
    """Bad flags or unreadable input; maps to exit code 2."""


@dataclass
class RunManifest:
    command: str
    config: dict
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @contextmanager
    def phase(self, name: str):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + max(0.0, time.perf_counter() - t0)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def replay_budget_from_env(environ=None) -> int:
    environ = os.environ if environ is None else environ
    raw = environ.get(BUDGET_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_REPLAY_BUDGET
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{BUDGET_ENV} must be a positive integer, got {raw!r}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _emit_manifest(manifest: RunManifest, path) -> None:
    if path:
        _write_text(Path(path), manifest.to_json() + "\n")
    else:
        print(manifest.to_json(), file=sys.stderr)


# ---------------------------------------------------------------------------
# detect

def _series_path(out: Path) -> Path:
    return out.with_name(out.stem + ".series.csv")


def cmd_detect(args) -> int:
    config = DetectorConfig(args.window, args.p_threshold, replay_budget_from_env())
    manifest = RunManifest("detect", asdict(config), inputs=[str(args.log)])
    with manifest.phase("read"):
        log = read_log(args.log, args.format)
    with manifest.phase("detect"):
        report = detect(log, config)
    with manifest.phase("write"):
        if args.out:
            out = Path(args.out)
            series = Path(args.series) if args.series else _series_path(out)
            _write_text(out, report.to_json() + "\n")
            _write_text(series, report.series_csv())
            manifest.outputs += [str(out), str(series)]
        else:
            print(report.to_json())
            if args.series:
                _write_text(Path(args.series), report.series_csv())
                manifest.outputs.append(str(args.series))
    _emit_manifest(manifest, args.manifest)
    return 0


# ---------------------------------------------------------------------------
# generate

def cmd_generate(args) -> int:
    if args.builtin:
        tree = BUILTIN_MODELS[args.builtin]
        model_name = args.builtin
    else:
        tree = parse_tree(Path(args.model).read_text(encoding="utf-8"))
        model_name = None
        if args.selector is None:
            raise InputError("--selector is required with --model")
    manifest = RunManifest(
        "generate",
        {
            "model": args.builtin or str(args.model),
            "pattern": args.pattern,
            "selector": args.selector,
            "size": args.size,
            "period": args.period,
            "seed": args.seed,
            "loop_continue_prob": args.loop_prob,
        },
        inputs=[] if args.builtin else [str(args.model)],
    )
    with manifest.phase("generate"):
        entry = generate_entry(
            tree, args.pattern, args.selector, size=args.size, period=args.period,
            seed=args.seed, fragment=args.fragment, loop_continue_prob=args.loop_prob,
            model_name=model_name,
        )
    with manifest.phase("write"):
        write_entry(entry, args.out)
    manifest.outputs = [str(Path(args.out) / f) for f in ("log.xes", "truth.json", "provenance.json")]
    _emit_manifest(manifest, args.manifest)
    return 0


# ---------------------------------------------------------------------------
# evaluate

def _load_truth(path, epsilon=None) -> GroundTruth:
    return GroundTruth.from_json(Path(path).read_text(encoding="utf-8"), epsilon)


def cmd_evaluate(args) -> int:
    manifest = RunManifest("evaluate", {"epsilon": args.epsilon}, inputs=[str(args.report), str(args.truth)])
    with manifest.phase("evaluate"):
        report = json.loads(Path(args.report).read_text(encoding="utf-8"))
        detections = report["drift_indices"] if isinstance(report, dict) else report
        truth = _load_truth(args.truth, args.epsilon)
        result = classify(detections, truth)
    print(json.dumps(result.to_dict(), sort_keys=True))
    print(result.csv_row(log=str(args.report), n=report.get("config", {}).get("window_size", "")
                         if isinstance(report, dict) else ""), end="")
    _emit_manifest(manifest, args.manifest)
    return 0


# ---------------------------------------------------------------------------
# sweep

def _corpus_entries(corpus: Path) -> list[Path]:
    if not corpus.is_dir():
        raise InputError(f"corpus directory {corpus} does not exist")
    entries = sorted(p for p in corpus.iterdir() if (p / "log.xes").is_file() and (p / "truth.json").is_file())
    if not entries:
        raise InputError(f"corpus {corpus} holds no entries (directories with log.xes and truth.json)")
    return entries


def _sweep_cell(entry: str, windows: tuple[int, ...], epsilon_pct: float, p_threshold: float, budget: int):
    path = Path(entry)
    log = read_log(path / "log.xes")
    eps = default_epsilon(len(log), epsilon_pct)
    truth = _load_truth(path / "truth.json", eps)
    pattern = ""
    prov = path / "provenance.json"
    if prov.is_file():
        pattern = json.loads(prov.read_text(encoding="utf-8")).get("pattern", "")
    rows = []
    for n in windows:
        if len(log) <= n:
            detections = []
        else:
            detections = detect(log, DetectorConfig(n, p_threshold, budget)).drift_indices
        rows.append((path.name, pattern, n, classify(detections, truth)))
    return rows


def sweep(entries, windows, epsilon_pct=5.0, p_threshold=0.05, budget=DEFAULT_REPLAY_BUDGET, jobs=1):
    """Per-(entry, n) results in (entry, n) order."""
    windows = tuple(windows)
    tasks = [(str(e), windows, epsilon_pct, p_threshold, budget) for e in entries]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sweep_cell, *zip(*tasks)))
    else:
        chunks = [_sweep_cell(*t) for t in tasks]
    return [row for chunk in chunks for row in chunk]


def summarize(cells, windows) -> list[tuple[int, float, float | None]]:
    out = []
    for n in windows:
        results = [r for (_, _, m, r) in cells if m == n]
        f = sum(r.f_score for r in results) / len(results)
        delays = [r.mean_delay for r in results if r.mean_delay is not None]
        out.append((n, f, sum(delays) / len(delays) if delays else None))
    return out


def cmd_sweep(args) -> int:
    budget = replay_budget_from_env()
    entries = _corpus_entries(Path(args.corpus))
    windows = sorted(set(args.windows))
    manifest = RunManifest(
        "sweep",
        {"windows": windows, "epsilon_pct": args.epsilon_pct, "p_threshold": args.p_threshold,
         "replay_budget": budget, "jobs": args.jobs},
        inputs=[str(e) for e in entries],
    )
    with manifest.phase("sweep"):
        cells = sweep(entries, windows, args.epsilon_pct, args.p_threshold, budget, args.jobs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "mean_fscore", "mean_delay"])
    for n, f, d in summarize(cells, windows):
        w.writerow([n, repr(f), "" if d is None else repr(d)])
    if args.out:
        _write_text(Path(args.out), buf.getvalue())
        manifest.outputs.append(str(args.out))
    else:
        sys.stdout.write(buf.getvalue())
    if args.cells:
        rows = "".join(r.csv_row(log=name, pattern=pattern, n=n) for name, pattern, n, r in cells)
        _write_text(Path(args.cells), ",".join(CSV_COLUMNS) + "\n" + rows)
        manifest.outputs.append(str(args.cells))
    _emit_manifest(manifest, args.manifest)
    return 0


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftscan", description="Offline control-flow drift detection.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_manifest(p):
        p.add_argument("--manifest", help="write the run manifest here instead of stderr")

    p = sub.add_parser("detect", help="detect drifts in an event log")
    p.add_argument("--log", required=True)
    p.add_argument("--window", type=int, required=True, help="window size n")
    p.add_argument("--format", choices=("xes", "csv"), help="default: from the file extension")
    p.add_argument("--p-threshold", type=float, default=0.05)
    p.add_argument("--out", help="report JSON path; the series CSV goes next to it")
    p.add_argument("--series", help="series CSV path")
    add_manifest(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("generate", help="generate a drifting corpus entry")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", help="file holding a process tree in text form")
    src.add_argument("--builtin", choices=sorted(BUILTIN_MODELS))
    p.add_argument("--pattern", required=True, help=f"one of {', '.join(PATTERNS)}")
    p.add_argument("--selector", help="dot-separated child path, e.g. 2.0.0")
    p.add_argument("--fragment", help="process tree text inserted by re / substituted by rp")
    p.add_argument("--size", type=int, default=2500)
    p.add_argument("--period", type=int, default=250)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--loop-prob", type=float, default=0.3)
    p.add_argument("--out", required=True)
    add_manifest(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="score a report against ground truth")
    p.add_argument("--report", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--epsilon", type=int)
    add_manifest(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("sweep", help="mean F-score and delay per window size over a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--windows", type=_int_list, default=[10, 25, 50, 100, 150, 200])
    p.add_argument("--epsilon-pct", type=float, default=5.0)
    p.add_argument("--p-threshold", type=float, default=0.05)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.add_argument("--cells", help="per-(log, n) CSV")
    add_manifest(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (InputError, DriftScanError, OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"driftscan {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        logger.debug("internal error", exc_info=True)
        print(f"driftscan {args.command}: internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
