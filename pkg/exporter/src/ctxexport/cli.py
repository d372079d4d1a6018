"""Command-line entry points for hidden-state and label export."""

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ExportError
from .export import ExportSpec, export_hidden_states, export_labels


def _read_text(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir, command, args, outputs) -> None:
    manifest = {
        "tool": "ctxexport",
        "version": __version__,
        "command": command,
        "args": {k: v for k, v in vars(args).items() if k != "func"},
        "outputs": {str(p): _sha256(p) for p in outputs},
    }
    path = Path(out_dir) / f"{command}.manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _spec_from_args(args, need_answer=False) -> ExportSpec:
    answer = _read_text(args.answer) if getattr(args, "answer", None) else None
    return ExportSpec(
        model=args.model,
        context_text=_read_text(args.context),
        query_text=_read_text(args.query),
        answer_text=answer,
        max_length=args.max_length,
        segment_size=args.segment_size,
        layer=args.layer,
        encode_mode=args.encode_mode,
    )


def cmd_export(args) -> int:
    spec = _spec_from_args(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ctx_path = out_dir / "context.cemb"
    qry_path = out_dir / "query.cemb"
    report = export_hidden_states(spec, ctx_path, qry_path)
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    (out_dir / "export_report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    )
    _write_manifest(out_dir, "export", args,
                    [ctx_path, qry_path, out_dir / "export_report.json"])
    print(json.dumps(report.to_dict()))
    return 0


def cmd_labels(args) -> int:
    spec = _spec_from_args(args, need_answer=True)
    result = export_labels(spec)
    if "warning" in result:
        print(f"warning: {result['warning']}", file=sys.stderr)
    out = Path(args.out)
    out.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    _write_manifest(out.parent, "labels", args, [out])
    print(json.dumps({"labels": result["labels"]}))
    return 0


def _add_common(sub) -> None:
    sub.add_argument("--model", required=True, help="model path or identifier")
    sub.add_argument("--context", required=True, help="context text file")
    sub.add_argument("--query", required=True, help="query text file")
    sub.add_argument("--max-length", type=int, default=512, dest="max_length")
    sub.add_argument("--segment-size", type=int, default=8, dest="segment_size")
    sub.add_argument("--layer", type=int, default=-1,
                     help="hidden-state layer to export (default: last)")
    sub.add_argument("--encode-mode", choices=("joint", "separate"),
                     default="joint", dest="encode_mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxexport",
        description="Export causal-LM hidden states and segment labels",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subs = parser.add_subparsers(dest="command", required=True)

    exp = subs.add_parser("export", help="write context.cemb and query.cemb")
    _add_common(exp)
    exp.add_argument("--out-dir", required=True, dest="out_dir")
    exp.set_defaults(func=cmd_export)

    lab = subs.add_parser("labels", help="write per-segment answer labels")
    _add_common(lab)
    lab.add_argument("--answer", required=True, help="answer text file")
    lab.add_argument("--out", required=True)
    lab.set_defaults(func=cmd_labels)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
