"""Pipeline driver and offline query CLI.

Subcommands map 1:1 onto library operations: ingest/extract/build stage the
pipeline artifacts, export emits the canonical graph bytes, recommend/
trends/infobox query a built graph, eval-ie and eval-rec run the two
evaluation harnesses, and serve starts the HTTP facade. Exit codes: 0 on
success, 1 for usage errors, 2 for data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from .errors import KgforgeError
from .extraction import load_gazetteer, load_rules
from .ie_eval import load_gold_corpus, predict_corpus, render_report as render_ie_report, score
from .pipeline import (
    Artifacts,
    BuildResult,
    PipelineConfig,
    build_state,
    build_to_dir,
    extract_to_dir,
    ingest_to_dir,
    load_state_from_dir,
)
from .rec_eval import evaluate, evaluate_all, load_judgments_csv, render_report as render_rec_report
from .analytics import infobox, trend_table

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_ERROR)


def _load_config(args) -> PipelineConfig:
    config = PipelineConfig.load(args.config)
    if getattr(args, "workdir", None):
        config.output_dir = Path(args.workdir)
    return config


def _state(config: PipelineConfig) -> BuildResult:
    artifacts = Artifacts(config.output_dir)
    if artifacts.graph.exists() and artifacts.model.exists():
        return load_state_from_dir(config, config.output_dir)
    return build_state(config)


def _emit(args, payload, table: Optional[str] = None) -> None:
    if getattr(args, "format", "json") == "table" and table is not None:
        print(table, end="" if table.endswith("\n") else "\n")
    else:
        print(json.dumps(payload, sort_keys=True, indent=2))


def cmd_ingest(args) -> int:
    config = _load_config(args)
    result = ingest_to_dir(config, config.output_dir)
    print(f"ingested {len(result.triples)} triples, {len(result.documents)} documents -> {config.output_dir}")
    return 0


def cmd_extract(args) -> int:
    config = _load_config(args)
    facts = extract_to_dir(config, config.output_dir)
    print(f"extracted {len(facts)} facts -> {Artifacts(config.output_dir).facts}")
    return 0


def cmd_build(args) -> int:
    config = _load_config(args)
    result = build_to_dir(config, config.output_dir)
    artifacts = Artifacts(config.output_dir)
    print(
        f"built graph with {len(result.kg)} triples, model {result.model.n}x{result.model.m} "
        f"-> {artifacts.graph}, {artifacts.model}"
    )
    return 0


def cmd_export(args) -> int:
    config = _load_config(args)
    state = _state(config)
    data = state.kg.export_canonical()
    if args.out:
        Path(args.out).write_bytes(data)
        print(f"wrote {len(data)} bytes to {args.out}")
    else:
        sys.stdout.buffer.write(data)
    return 0


def cmd_recommend(args) -> int:
    config = _load_config(args)
    state = _state(config)
    if args.category not in config.categories:
        raise KgforgeError(f"unknown category {args.category!r}; configured: {sorted(config.categories)}")
    k = args.k if args.k is not None else config.k_defaults.get(args.category, 10)
    target_type = config.categories[args.category]
    recommendations = state.recommender.recommend(args.user, target_type, k)
    payload = []
    lines = []
    for rec in recommendations:
        explanation = state.recommender.explain(args.user, rec.item, top_m=args.explain_top)
        entry = rec.as_dict()
        entry["explanation"] = explanation.as_dict()
        payload.append(entry)
        lines.append(f"{rec.rank:>3}. {rec.item}  score={rec.score:.4f}")
    _emit(args, payload, "\n".join(lines) + "\n" if lines else "no recommendations\n")
    return 0


def cmd_trends(args) -> int:
    config = _load_config(args)
    state = _state(config)
    table = trend_table(state.hierarchy, state.kg, args.type, args.year_from, args.year_to)
    header = ["entity", "label"] + [str(y) for y in table.years] + ["total"]
    rows = [header]
    for row in table.rows:
        rows.append(
            [row.entity_id, row.label]
            + [f"{row.cells[y]:.1f}" for y in table.years]
            + [str(row.total)]
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(header))]
    rendered = "\n".join("  ".join(cell.ljust(w) for cell, w in zip(r, widths)) for r in rows) + "\n"
    _emit(args, table.as_dict(), rendered)
    return 0


def cmd_infobox(args) -> int:
    config = _load_config(args)
    state = _state(config)
    box = infobox(state.kg, state.hierarchy, args.entity)
    lines = [f"{box.label} ({box.entity_id})  types: {', '.join(box.types)}"]
    for row in box.rows:
        for obj in row.objects:
            marks = []
            for record in obj.provenance:
                marks.append("background KB" if record["kind"] == "background" else f"\"{record['sentence']}\"")
            lines.append(f"  {row.relation_label}: {obj.label}  [{'; '.join(marks)}]")
    _emit(args, box.as_dict(), "\n".join(lines) + "\n")
    return 0


def cmd_eval_ie(args) -> int:
    config = _load_config(args)
    gold = load_gold_corpus(args.gold)
    gazetteer = load_gazetteer(config.gazetteer)
    rules = load_rules(config.rules)
    mentions, facts = predict_corpus(gold, gazetteer, rules, config.abbreviations)
    report = score(gold, mentions, facts)
    _emit(args, report.as_dict(), render_ie_report(report))
    return 0


def cmd_eval_rec(args) -> int:
    judgments = load_judgments_csv(args.judgments)
    k_defaults = {}
    if args.config:
        k_defaults = PipelineConfig.load(args.config).k_defaults
    if args.criterion:
        results = evaluate(judgments, args.criterion, k_defaults)
        payload = {"results": [r.as_dict() for r in results]}
        lines = [
            f"{r.category} [{r.criterion}] MAP={r.map:.4f} P@{r.k}={r.p_at_k:.4f} ({r.users} users)"
            for r in results
        ]
        _emit(args, payload, "\n".join(lines) + "\n")
    else:
        report = evaluate_all(judgments, k_defaults)
        _emit(args, report.as_dict(), render_rec_report(report))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceRuntime, create_app

    config = _load_config(args)
    state = build_state(config)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    runtime = ServiceRuntime(
        build=state,
        config=config,
        feedback_path=config.output_dir / "feedback.jsonl",
        rebuild=lambda version: build_state(config, version=version),
    )
    ui_dir = Path(args.ui) if args.ui else None
    app = create_app(runtime, ui_dir=ui_dir)
    port = args.port if args.port is not None else config.service.port
    uvicorn.run(app, host=args.host, port=port, log_level="info")
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="kgforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="pipeline config JSON")
        p.add_argument("--workdir", help="artifact directory (overrides config output_dir)")

    p = sub.add_parser("ingest", help="map sources to integration triples")
    common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("extract", help="run text-to-fact extraction over registered documents")
    common(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("build", help="assemble graph, fit VSM model and hierarchy")
    common(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("export", help="write the canonical graph serialization")
    common(p)
    p.add_argument("--out", help="output file (default: stdout)")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("recommend", help="rank items for a user")
    common(p)
    p.add_argument("--user", required=True)
    p.add_argument("--category", required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--explain-top", type=int, default=5)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_recommend)

    p = sub.add_parser("trends", help="per-year trend table for a type")
    common(p)
    p.add_argument("--type", required=True)
    p.add_argument("--from", dest="year_from", type=int, required=True)
    p.add_argument("--to", dest="year_to", type=int, required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_trends)

    p = sub.add_parser("infobox", help="induced infobox for an entity")
    common(p)
    p.add_argument("--entity", required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_infobox)

    p = sub.add_parser("eval-ie", help="score the extractor against a gold corpus")
    common(p)
    p.add_argument("--gold", required=True)
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_eval_ie)

    p = sub.add_parser("eval-rec", help="MAP / P@K over graded judgments")
    p.add_argument("--judgments", required=True)
    p.add_argument("--criterion", choices=("LOW", "MEDIUM", "HIGH"))
    p.add_argument("--config", help="optional config for per-category K defaults")
    p.add_argument("--format", choices=("json", "table"), default="json")
    p.set_defaults(func=cmd_eval_rec)

    p = sub.add_parser("serve", help="serve the HTTP API")
    common(p)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int)
    p.add_argument("--ui", help="directory with built web UI to mount at /ui")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_ERROR
    try:
        return args.func(args)
    except KgforgeError as exc:
        print(f"kgforge: {exc}", file=sys.stderr)
        return DATA_ERROR
    except FileNotFoundError as exc:
        print(f"kgforge: {exc}", file=sys.stderr)
        return DATA_ERROR


if __name__ == "__main__":
    sys.exit(main())
