"""Command-line pipeline: ingest -> preprocess/sample -> code -> irr /
cluster / report -> respond, plus the annotation service."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from phishcode import __version__
from phishcode.agreement import AnnotationSet, agreement_report
from phishcode.autocoder import code_email
from phishcode.campaigns import (
    cluster_multilayer,
    cluster_stats,
    summaries_to_json,
    summaries_to_text_table,
    summarize_cluster,
    transport_table,
)
from phishcode.codebook import (
    CodebookSchema,
    read_coded_csv,
    read_coded_jsonl,
    validate_coded,
    write_coded_csv,
    write_coded_jsonl,
)
from phishcode.guidance import TemplateSet, generate_guidance
from phishcode.lexicons import load_lexicons
from phishcode.mailparse import MailboxFormatError, assign_ids, parse_mailbox
from phishcode.preprocess import preprocess, sample_by_frequency
from phishcode.records import SamplingPlan, read_records_jsonl, write_records_jsonl
from phishcode.reports import cooccurrence_report, distribution_report

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INPUT = 3
EXIT_VALIDATION = 4


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = EXIT_INPUT):
        super().__init__(message)
        self.exit_code = exit_code


def _fail(message: str, code: int) -> "CliError":
    return CliError(message, code)


def _read_coded_any(path: Path):
    if not path.is_file():
        raise _fail(f"coded input not found: {path}", EXIT_INPUT)
    if path.suffix == ".csv":
        return list(read_coded_csv(path))
    return list(read_coded_jsonl(path))


def _read_records(path: Path):
    if not path.is_file():
        raise _fail(f"records input not found: {path}", EXIT_INPUT)
    return list(read_records_jsonl(path))


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_ingest(args) -> int:
    src = Path(args.input)
    if not src.is_file():
        raise _fail(f"input not found: {src}", EXIT_INPUT)
    try:
        raws = parse_mailbox(src.read_bytes(), fmt=args.format, origin_path=str(src))
    except MailboxFormatError as exc:
        raise _fail(f"malformed {args.format}: {exc}", EXIT_INPUT)
    records = assign_ids(raws)
    kept, dropped = preprocess(records, language_filter=not args.no_language_filter)
    out = _outdir(args)
    with open(out / "records.jsonl", "w", encoding="utf-8") as fp:
        write_records_jsonl(kept, fp)
    with open(out / "dropped.jsonl", "w", encoding="utf-8") as fp:
        for rec, reason in dropped:
            fp.write(json.dumps({"id": rec.id, "reason": reason}, sort_keys=True))
            fp.write("\n")
    print(f"ingested {len(records)} messages: kept {len(kept)}, dropped {len(dropped)}")
    return EXIT_OK


def cmd_sample(args) -> int:
    records = _read_records(Path(args.input))
    plan = SamplingPlan(
        year=args.year,
        window_months=args.window,
        sample_size=args.sample_size,
        seed=args.seed,
    )
    sampled = sample_by_frequency(records, plan)
    out = _outdir(args)
    with open(out / "sample.jsonl", "w", encoding="utf-8") as fp:
        write_records_jsonl(sampled, fp)
    print(f"sampled {len(sampled)} of {len(records)} records")
    return EXIT_OK


def cmd_code(args) -> int:
    records = _read_records(Path(args.input))
    lex = load_lexicons(args.lexicons, gazetteer=args.gazetteer)
    schema = CodebookSchema()
    coded = [
        code_email(
            rec,
            lex,
            schema,
            recipient_name=args.recipient_name,
            recipient_address=args.recipient_email,
        )
        for rec in records
    ]
    bad = [(c.email_id, v) for c in coded for v in validate_coded(c, schema)]
    if bad:
        raise _fail(f"autocoder produced invalid records: {bad[:5]}", EXIT_VALIDATION)
    out = _outdir(args)
    with open(out / "coded.csv", "w", encoding="utf-8", newline="") as fp:
        write_coded_csv(coded, fp)
    with open(out / "coded.jsonl", "w", encoding="utf-8") as fp:
        write_coded_jsonl(coded, fp)
    print(f"coded {len(coded)} records")
    return EXIT_OK


def cmd_irr(args) -> int:
    coded_a = _read_coded_any(Path(args.coded_a))
    coded_b = _read_coded_any(Path(args.coded_b))
    set_a = AnnotationSet.from_coded("coder-a", coded_a)
    set_b = AnnotationSet.from_coded("coder-b", coded_b)
    try:
        report = agreement_report(set_a, set_b)
    except ValueError as exc:
        raise _fail(str(exc), EXIT_VALIDATION)
    out = _outdir(args)
    (out / "agreement.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (out / "agreement.txt").write_text(report.to_text_table() + "\n", encoding="utf-8")
    print(report.to_text_table())
    return EXIT_OK


def cmd_cluster(args) -> int:
    coded = _read_coded_any(Path(args.input))
    if not coded:
        raise _fail("no coded emails in input", EXIT_INPUT)
    matcher = "levenshtein" if args.matcher == "lev" else "exact"
    result = cluster_multilayer(coded, matcher=matcher, lev_threshold=args.lev_threshold)
    leaves = result.leaves
    stats = cluster_stats(result.layers[3])
    out = _outdir(args)

    coded_index = {c.email_id: c for c in coded}
    payload = {
        "matcher": args.matcher,
        "lev_threshold": args.lev_threshold if args.matcher == "lev" else None,
        "step3_stats": {
            "total_clusters": stats.total_clusters,
            "multi_clusters": stats.multi_clusters,
            "large_clusters": stats.large_clusters,
            "mean_size_excl_singletons": stats.mean_size_excl_singletons,
            "median_size_excl_singletons": stats.median_size_excl_singletons,
        },
        "leaves": [
            {
                "sector": cl.key.sector,
                "action_set": cl.key.action_set,
                "company": cl.key.company,
                "topic": cl.key.topic,
                "action_specific": cl.key.action_specific,
                "members": list(cl.member_ids),
            }
            for cl in leaves
        ],
    }
    (out / "clusters.json").write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    if args.records:
        records = {r.id: r for r in _read_records(Path(args.records))}
        summaries = [
            summarize_cluster(cl, records, coded_index)
            for cl in leaves
            if cl.size >= args.min_summary_size
        ]
        (out / "cluster_summaries.json").write_text(
            summaries_to_json(summaries) + "\n", encoding="utf-8"
        )
        (out / "cluster_summaries.txt").write_text(
            summaries_to_text_table(summaries) + "\n", encoding="utf-8"
        )
        if args.transport_tables:
            blocks = []
            for cl in leaves:
                if cl.size > 1:
                    blocks.append(transport_table(cl, records))
            (out / "cluster_transport.txt").write_text(
                ("\n\n".join(blocks) + "\n") if blocks else "", encoding="utf-8"
            )
    print(
        f"{len(leaves)} leaf clusters; step-3: {stats.total_clusters} clusters, "
        f"{stats.multi_clusters} multi, {stats.large_clusters} large"
    )
    return EXIT_OK


def cmd_report(args) -> int:
    coded = _read_coded_any(Path(args.input))
    if not coded:
        raise _fail("no coded emails in input", EXIT_INPUT)
    report = distribution_report(coded)
    out = _outdir(args)
    (out / "distribution.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (out / "distribution.txt").write_text(report.to_text_table() + "\n", encoding="utf-8")
    with open(out / "distribution.csv", "w", encoding="utf-8", newline="") as fp:
        report.write_csv(fp)
    cooc = cooccurrence_report(coded, "urgency", "threat", "urgent", "threat")
    (out / "cooccurrence.json").write_text(
        json.dumps(
            {
                "codes": ["urgency=urgent", "threat=threat"],
                "count": cooc.count,
                "frac_of_urgent": round(cooc.frac_of_a, 4),
                "frac_of_threat": round(cooc.frac_of_b, 4),
            },
            indent=2,
            sort_keys=True,
        )
        + "\n",
        encoding="utf-8",
    )
    print(report.to_text_table())
    return EXIT_OK


def cmd_respond(args) -> int:
    records = {r.id: r for r in _read_records(Path(args.input))}
    if args.id not in records:
        raise _fail(f"record id not found: {args.id}", EXIT_INPUT)
    record = records[args.id]
    lex = load_lexicons(args.lexicons, gazetteer=args.gazetteer)
    schema = CodebookSchema()
    if args.coded:
        coded_index = {c.email_id: c for c in _read_coded_any(Path(args.coded))}
        if args.id not in coded_index:
            raise _fail(f"coded entry not found for: {args.id}", EXIT_INPUT)
        coded = coded_index[args.id]
    else:
        coded = code_email(
            record,
            lex,
            schema,
            recipient_name=args.recipient_name,
            recipient_address=args.recipient_email,
        )
    response = generate_guidance(coded, record, TemplateSet(args.templates), lex)
    out = _outdir(args)
    (out / f"guidance_{args.id}.json").write_text(response.to_json() + "\n", encoding="utf-8")
    (out / f"guidance_{args.id}.txt").write_text(response.to_text(), encoding="utf-8")
    print(response.to_text())
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from phishcode.service import AnnotationStore, create_app

    store = AnnotationStore(
        journal_path=Path(args.store),
        coders=dict(kv.split("=", 1) for kv in args.coder),
        recipient_name=args.recipient_name,
        recipient_address=args.recipient_email,
        lexicon_dir=args.lexicons,
        gazetteer_path=args.gazetteer,
    )
    if args.emails:
        store.load_emails(_read_records(Path(args.emails)))
    app = create_app(store)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="phishcode",
        description="phishing email corpus coding, clustering, and guidance",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse an mbox/eml archive into records JSONL")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("mbox", "eml"), default="mbox")
    p.add_argument("--out", required=True)
    p.add_argument("--no-language-filter", action="store_true")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("sample", help="frequency-window sample of a year")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--year", type=int, required=True)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--sample-size", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("code", help="auto-code records into the codebook fields")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lexicons", default=None)
    p.add_argument("--gazetteer", default=None)
    p.add_argument("--recipient-name", default="")
    p.add_argument("--recipient-email", default="")
    p.set_defaults(fn=cmd_code)

    p = sub.add_parser("irr", help="inter-rater agreement between two coded files")
    p.add_argument("coded_a")
    p.add_argument("coded_b")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_irr)

    p = sub.add_parser("cluster", help="multi-layer campaign clustering")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--records", default=None, help="records JSONL for summaries")
    p.add_argument("--matcher", choices=("exact", "lev"), default="exact")
    p.add_argument("--lev-threshold", type=int, default=5)
    p.add_argument("--min-summary-size", type=int, default=2)
    p.add_argument("--transport-tables", action="store_true")
    p.set_defaults(fn=cmd_cluster)

    p = sub.add_parser("report", help="label distributions and co-occurrence")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("respond", help="guidance for one record")
    p.add_argument("--input", required=True, help="records JSONL")
    p.add_argument("--id", required=True)
    p.add_argument("--coded", default=None, help="coded CSV/JSONL (else auto-code)")
    p.add_argument("--out", required=True)
    p.add_argument("--lexicons", default=None)
    p.add_argument("--gazetteer", default=None)
    p.add_argument("--templates", default=None)
    p.add_argument("--recipient-name", default="")
    p.add_argument("--recipient-email", default="")
    p.set_defaults(fn=cmd_respond)

    p = sub.add_parser("serve", help="run the annotation service")
    p.add_argument("--store", required=True, help="journal file path")
    p.add_argument("--emails", default=None, help="records JSONL to load")
    p.add_argument("--coder", action="append", default=[], help="coder_id=token (repeatable)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8077)
    p.add_argument("--lexicons", default=None)
    p.add_argument("--gazetteer", default=None)
    p.add_argument("--recipient-name", default="")
    p.add_argument("--recipient-email", default="")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(json.dumps({"error": str(exc), "code": exc.exit_code}), file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        print(json.dumps({"error": str(exc), "code": EXIT_VALIDATION}), file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(json.dumps({"error": str(exc), "code": EXIT_INPUT}), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
