"""Batch command line: validate, table, parse, compare, report.

Exit codes: 0 success, 1 usage, 2 input error, 3 validation failure,
4 partial failure or empty result.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import statistics
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .activation import SpreadParams, build_relatedness_table, dump_table, load_table
from .corpus import (SETUPS, TEXT_SETUPS, CorpusError, SimilaritySample, annotation_frames, histogram,
                     load_corpus, pairwise_similarities, parse_record, stats_from_counts)
from .graph import RELATION_TYPES, FrameDatabaseError, load_frame_database, validate
from .similarity import build_array
from .stats import KINDS, SummaryStats, dump_report, summarize, t_test

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_INVALID, EXIT_PARTIAL = 0, 1, 2, 3, 4
FORMATS = ("csv", "records", "svg-histogram")
CONFIG_ENV = "FRAMESIM_CONFIG"
_PATH_KEYS = ("frame_db", "corpus", "table", "out")

log = logging.getLogger("framesim")


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    frame_db: str | None = None
    corpus: str | None = None
    table: str | None = None
    out: str | None = None
    decay: float = 0.5
    max_depth: int = 4
    threshold: float = 0.05
    traversal: str = "undirected"
    relations: list = field(default_factory=lambda: sorted(RELATION_TYPES))
    relation_weights: dict = field(default_factory=dict)
    formats: list = field(default_factory=lambda: ["csv"])
    setups: list = field(default_factory=list)
    from_summary: list = field(default_factory=list)
    csv: list = field(default_factory=list)
    kind: str = "welch"
    bins: int = 10
    jobs: int = 1

    def spread_params(self) -> SpreadParams:
        try:
            return SpreadParams(self.decay, self.max_depth, self.threshold, frozenset(self.relations),
                                self.relation_weights, self.traversal)
        except ValueError as exc:
            raise UsageError(str(exc)) from None


class _JsonLogFormatter(logging.Formatter):
    def format(self, record):
        return json.dumps({"level": record.levelname.lower(), "msg": record.getMessage()})


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.split(",") if v.strip()]


def _weights(value: str) -> dict:
    out = {}
    for item in _split(value):
        name, _, w = item.partition("=")
        try:
            out[name.strip()] = float(w)
        except ValueError:
            raise argparse.ArgumentTypeError(f"bad relation weight {item!r}, expected TYPE=W") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"JSON config file (default: ${CONFIG_ENV})")
    common.add_argument("--frame-db", dest="frame_db")
    common.add_argument("--corpus")
    common.add_argument("--table")
    common.add_argument("--out")
    common.add_argument("--decay", type=float)
    common.add_argument("--max-depth", dest="max_depth", type=int)
    common.add_argument("--threshold", type=float)
    common.add_argument("--traversal", choices=("undirected", "parents_only", "children_only"))
    common.add_argument("--relations", type=_split, help="comma-separated relation types")
    common.add_argument("--weights", dest="relation_weights", type=_weights, help="TYPE=W,...")
    common.add_argument("--format", dest="formats", type=_split, help=f"subset of {','.join(FORMATS)}")
    common.add_argument("--setup", dest="setups", action="append", choices=SETUPS)
    common.add_argument("--from-summary", dest="from_summary", action="append", metavar="M,S,N")
    common.add_argument("--csv", action="append", help="similarity CSV (report input)")
    common.add_argument("--kind", choices=KINDS)
    common.add_argument("--bins", type=int)
    common.add_argument("--jobs", type=int)
    common.add_argument("--quiet", action="store_true", default=None)

    parser = _Parser(prog="framesim", description="Frame-semantic similarity by spread activation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in [("validate", "check a frame database"),
                        ("table", "build the relatedness table"),
                        ("parse", "parse caption records into frames"),
                        ("compare", "cosine similarities between two setups"),
                        ("report", "t-tests over similarity samples or summaries")]:
        sub.add_parser(name, parents=[common], help=help_)
    return parser


def load_config(args: argparse.Namespace, environ=os.environ) -> RunConfig:
    """Config file values first, command-line flags override them."""
    values: dict = {}
    path = args.config or environ.get(CONFIG_ENV)
    if path:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config {path}: {exc}") from None
        if not isinstance(raw, dict):
            raise InputError(f"config {path} must hold a JSON object")
        base = Path(path).parent
        for key, value in raw.items():
            key = key.replace("-", "_")
            if key in _PATH_KEYS and isinstance(value, str):
                value = str(base / value)
            if key in ("relations", "formats", "setups", "from_summary", "csv") and isinstance(value, str):
                value = _split(value)
            values[key] = value
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command", "quiet"):
            values[key] = value
    known = set(RunConfig.__dataclass_fields__)
    unknown = set(values) - known
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(**values)
    bad = set(cfg.formats) - set(FORMATS)
    if bad:
        raise UsageError(f"unknown output formats: {sorted(bad)}")
    if cfg.bins < 1 or cfg.jobs < 1:
        raise UsageError("--bins and --jobs must be >= 1")
    return cfg


# --- helpers ---------------------------------------------------------------

def _require(cfg: RunConfig, *keys: str) -> None:
    for key in keys:
        if not getattr(cfg, key):
            raise UsageError(f"--{key.replace('_', '-')} is required")


def _load_graph(cfg: RunConfig, strict: bool = True):
    try:
        return load_frame_database(cfg.frame_db, strict=strict)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read frame database: {exc}") from None
    except FrameDatabaseError as exc:
        raise InputError(f"invalid frame database {cfg.frame_db}: {exc}") from None


def _load_corpus(cfg: RunConfig, graph, **kwargs):
    try:
        return load_corpus(cfg.corpus, graph, **kwargs)
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read corpus: {exc}") from None
    except CorpusError as exc:
        raise InputError(f"invalid corpus {cfg.corpus}: {exc}") from None


def _table(cfg: RunConfig, graph, params):
    if cfg.table and Path(cfg.table).exists():
        try:
            table = load_table(cfg.table, params)
        except (OSError, ValueError) as exc:
            raise InputError(f"cannot read table {cfg.table}: {exc}") from None
        missing = [f for f in graph.frame_ids if f not in table.rows]
        if missing:
            raise InputError(f"table {cfg.table} lacks rows for frames {missing[:5]}")
        return table
    return build_relatedness_table(graph, params, workers=cfg.jobs)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def _jsonl(records) -> str:
    return "".join(json.dumps(r, ensure_ascii=False) + "\n" for r in records)


def histogram_svg(counts, width: int = 400, height: int = 200) -> str:
    """Minimal bar chart of ``histogram`` output over [0, 1]."""
    top = max((c for _, c in counts), default=0) or 1
    bar_w = width / len(counts)
    bars = []
    for i, ((lo, hi), c) in enumerate(counts):
        h = height * c / top
        bars.append(f'<rect x="{i * bar_w:.3f}" y="{height - h:.3f}" width="{bar_w:.3f}" '
                    f'height="{h:.3f}" fill="steelblue" stroke="white"><title>[{lo:.3g}, {hi:.3g}]: {c}'
                    f'</title></rect>')
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">\n' + "\n".join(bars) + "\n</svg>\n")


# --- commands --------------------------------------------------------------

def cmd_validate(cfg: RunConfig, stdout=sys.stdout) -> int:
    _require(cfg, "frame_db")
    graph = _load_graph(cfg, strict=False)
    report = validate(graph)
    for violation in report:
        print(violation, file=stdout)
    return EXIT_INVALID if report else EXIT_OK


def cmd_table(cfg: RunConfig, stdout=sys.stdout) -> int:
    _require(cfg, "frame_db")
    params = cfg.spread_params()
    graph = _load_graph(cfg)
    table = build_relatedness_table(graph, params, workers=cfg.jobs)
    path = Path(cfg.table) if cfg.table else Path(cfg.out or ".") / "table.jsonl"
    _write(path, dump_table(table))
    log.info("wrote %d table rows to %s", len(table.rows), path)
    return EXIT_OK


def cmd_parse(cfg: RunConfig, stdout=sys.stdout) -> int:
    _require(cfg, "frame_db", "corpus")
    params = cfg.spread_params()
    graph = _load_graph(cfg)
    corpus = _load_corpus(cfg, graph, allow_empty_text=True)
    table = _table(cfg, graph, params)
    setups = [s for s in (cfg.setups or TEXT_SETUPS) if s in TEXT_SETUPS]
    records = [r for r in corpus.records if r.setup in setups]

    def work(rec):
        try:
            return parse_record(rec, graph, params, table), None
        except ValueError as exc:
            return None, str(exc)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(cfg.jobs) as pool:
            results = list(pool.map(work, records))
    else:
        results = [work(r) for r in records]

    out_rows, trace_rows, failures = [], [], 0
    counts: dict = {s: [] for s in setups}
    for rec, (res, err) in zip(records, results):
        if err is not None:
            failures += 1
            log.error("record %s failed to parse: %s", rec.record_id, err)
            continue
        frames = sorted(res.annotation.evoked, key=graph.handle)
        out_rows.append({"id": rec.record_id, "image": rec.image_id, "setup": rec.setup, "lang": rec.lang,
                         "frames": frames, "lemmas": res.lemma_count, "frame_evoking": res.frame_count})
        trace_rows += res.trace(rec.record_id, graph)
        counts[rec.setup].append((res.frame_count, res.lemma_count))

    out = Path(cfg.out or ".")
    _write(out / "annotations.jsonl", _jsonl(out_rows))
    _write(out / "trace.jsonl", _jsonl(trace_rows))
    stats_rows = [vars(stats_from_counts(s, c)) for s, c in counts.items() if c]
    _write(out / "descriptive.jsonl", _jsonl(stats_rows))
    log.info("parsed %d records, %d failures", len(out_rows), failures)
    return EXIT_PARTIAL if failures else EXIT_OK


def cmd_compare(cfg: RunConfig, stdout=sys.stdout) -> int:
    _require(cfg, "frame_db", "corpus")
    if len(cfg.setups) != 2:
        raise UsageError("compare needs exactly two --setup options")
    a, b = cfg.setups
    params = cfg.spread_params()
    graph = _load_graph(cfg)
    corpus = _load_corpus(cfg, graph)
    table = _table(cfg, graph, params)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        try:
            sample = pairwise_similarities(corpus, a, b, graph, table, params)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    for image_id, reason in sample.skipped:
        log.warning("skipped image %s: %s", image_id, reason)
    if not sample.pairs:
        log.warning("no comparable images between %s and %s", a, b)
        return EXIT_PARTIAL

    out = Path(cfg.out or ".")
    stem = f"{a}_{b}"
    _write(out / f"similarity_{stem}.csv", sample.to_csv())
    values = sample.values
    counts = histogram(values, cfg.bins)
    summary = {"setup_a": a, "setup_b": b, "n": len(values), "mean": statistics.fmean(values),
               "stdev": statistics.stdev(values) if len(values) > 1 else 0.0,
               "histogram": [[lo, hi, c] for (lo, hi), c in counts],
               "skipped": [[img, why] for img, why in sample.skipped]}
    _write(out / f"summary_{stem}.json", json.dumps(summary, indent=2) + "\n")
    if "records" in cfg.formats:
        rows = []
        for image_id, _ in sample.pairs:
            for s in (a, b):
                rec = corpus.get(image_id, s)
                arr = build_array(annotation_frames(rec, graph, params, table), table)
                rows.append(arr.to_record(rec.record_id))
        _write(out / f"arrays_{stem}.jsonl", _jsonl(rows))
    if "svg-histogram" in cfg.formats:
        _write(out / f"histogram_{stem}.svg", histogram_svg(counts))
    print(json.dumps({k: summary[k] for k in ("setup_a", "setup_b", "n", "mean", "stdev")}), file=stdout)
    return EXIT_OK


def _report_inputs(cfg: RunConfig):
    if len(cfg.from_summary) % 2 or len(cfg.csv) % 2:
        raise UsageError("--from-summary and --csv inputs come in pairs")
    if not cfg.from_summary and not cfg.csv:
        raise InputError("report needs --from-summary or --csv inputs")
    pairs = []
    for s1, s2 in zip(cfg.from_summary[::2], cfg.from_summary[1::2]):
        try:
            pairs.append((f"{s1} vs {s2}", SummaryStats.parse(s1), SummaryStats.parse(s2)))
        except ValueError as exc:
            raise InputError(f"bad summary input: {exc}") from None
    for p1, p2 in zip(cfg.csv[::2], cfg.csv[1::2]):
        samples = []
        for p in (p1, p2):
            try:
                with open(p, encoding="utf-8") as fh:
                    samples.append(SimilaritySample.from_csv(fh))
            except (OSError, CorpusError, KeyError, ValueError) as exc:
                raise InputError(f"cannot read similarity CSV {p}: {exc}") from None
        s1, s2 = samples
        try:
            pairs.append((f"{s1.setup_a}x{s1.setup_b} vs {s2.setup_a}x{s2.setup_b}",
                          summarize(s1.values), summarize(s2.values)))
        except ValueError as exc:
            raise InputError(str(exc)) from None
    return pairs


def cmd_report(cfg: RunConfig, stdout=sys.stdout) -> int:
    rows = []
    for label, s1, s2 in _report_inputs(cfg):
        try:
            result = t_test(s1, s2, cfg.kind)
        except ZeroDivisionError as exc:
            raise InputError(f"{label}: {exc}") from None
        rows.append(result.to_record(label, s1.n, s2.n))
    text = dump_report(rows)
    stdout.write(text)
    if cfg.out:
        _write(Path(cfg.out) / "report.jsonl", text)
    return EXIT_OK


COMMANDS = {"validate": cmd_validate, "table": cmd_table, "parse": cmd_parse,
            "compare": cmd_compare, "report": cmd_report}


def _setup_logging(quiet: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(_JsonLogFormatter())
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.ERROR if quiet else logging.INFO)


def main(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    _setup_logging(bool(args.quiet))
    try:
        cfg = load_config(args)
        return COMMANDS[args.command](cfg, stdout=stdout)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except InputError as exc:
        log.error("%s", exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
