"""Command-line surface: compress, score, eval, lab, cost.

Exit codes: 0 success, 1 I/O failure, 2 validation failure.  Every command
that writes an output file also writes ``<out>.manifest.json`` recording the
resolved flags, input digests, tool version, and seed, so identical
manifests imply identical outputs.
"""

import argparse
import hashlib
import json
import os
import sys
from importlib import resources
from pathlib import Path

from . import __version__, costmodel, embio, lab, merge, metrics, realloc
from .core import mig_scores, pool_query, records_to_json
from .errors import CtxcompError, ValidationError


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(out_path, command, args, inputs, seed=None) -> None:
    manifest = {
        "command": command,
        "args": {k: v for k, v in sorted(vars(args).items()) if k != "func"},
        "inputs": {str(p): _sha256(p) for p in inputs},
        "version": __version__,
        "seed": seed,
    }
    _write_json(str(out_path) + ".manifest.json", manifest)


def _default_threads() -> int:
    return int(os.environ.get("COMI_THREADS", "1"))


def _check_threads(n: int) -> None:
    # Worker count may vary without changing any output byte; kernels are
    # sequential today, so the flag is validated and otherwise inert.
    if n < 1:
        raise ValidationError(f"--threads must be >= 1, got {n}")


def _config_from_args(args) -> realloc.CompressionConfig:
    if args.rate < 1:
        raise ValidationError(f"--rate must be >= 1, got {args.rate}")
    if args.min_group < 1:
        raise ValidationError(f"--min-group must be >= 1, got {args.min_group}")
    return realloc.CompressionConfig(
        rate=args.rate,
        redundancy_scope=args.scope,
        min_group_size=args.min_group,
    )


def cmd_compress(args) -> int:
    _check_threads(args.threads)
    ctx = embio.read_cemb(args.context)
    qry = embio.read_cemb(args.query)
    result = merge.compress(ctx, qry, _config_from_args(args))
    embio.write_cemb(result.to_matrix(), args.out)
    if args.trace:
        _write_json(args.trace, result.trace)
    _write_manifest(args.out, "compress", args, [args.context, args.query])
    return 0


def cmd_score(args) -> int:
    _check_threads(args.threads)
    ctx = embio.read_cemb(args.context)
    qry = embio.read_cemb(args.query)
    qbar = pool_query(qry)
    n = ctx.rows
    token_records = mig_scores(
        ctx, qbar, [[j for j in range(n) if j != i] for i in range(n)]
    )
    cfg = _config_from_args(args)
    part = realloc.initial_partition(n, cfg)
    group_records = realloc.group_gains(ctx, part, qbar, cfg)
    payload = {
        "rate": args.rate,
        "scope": args.scope,
        "tokens": records_to_json(token_records),
        "groups": records_to_json(group_records),
        "group_sizes": list(part.sizes),
    }
    _write_json(args.out, payload)
    _write_manifest(args.out, "score", args, [args.context, args.query])
    return 0


def _load_scores(path):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict) and "scores" in data:
        data = data["scores"]
    if isinstance(data, list) and data and isinstance(data[0], dict):
        data = [rec["gain"] for rec in data]
    if not isinstance(data, list):
        raise ValidationError(f"cannot interpret scores file {path}")
    return [float(x) for x in data]


def cmd_eval(args) -> int:
    if args.metric == "auc":
        scores = _load_scores(args.scores)
        with open(args.labels, "r", encoding="utf-8") as fh:
            labels = json.load(fh)["labels"]
        result = {"auc": metrics.auc(scores, labels)}
        inputs = [args.scores, args.labels]
    else:
        m = embio.read_cemb(args.emb)
        rows = m.data
        if args.scores is not None:
            if args.ratio is None:
                raise ValidationError("--scores requires --ratio")
            keep = metrics.retention_select(_load_scores(args.scores), args.ratio)
            rows = rows[keep]
        result = {"redundancy": metrics.redundancy_score(rows), "k": rows.shape[0]}
        inputs = [args.emb] + ([args.scores] if args.scores else [])
    print(json.dumps(result, sort_keys=True))
    if args.out:
        _write_json(args.out, result)
        _write_manifest(args.out, f"eval {args.metric}", args, inputs)
    return 0


def default_lab_config() -> dict:
    with resources.files("ctxcomp.data").joinpath("lab_default.json").open() as fh:
        return json.load(fh)


def cmd_lab(args) -> int:
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            cfg_dict = json.load(fh)
    else:
        cfg_dict = default_lab_config()
    cfg_dict["seed"] = args.seed
    cfg = lab.TrialConfig.from_dict(cfg_dict)
    report = lab.run_trials(cfg)
    payload = report.to_dict(include_trials=not args.summary_only)
    _write_json(args.out, payload)
    _write_manifest(
        args.out, "lab", args, [args.config] if args.config else [], seed=args.seed
    )
    print(
        json.dumps(
            {k: v for k, v in payload.items() if k != "per_trial"}, sort_keys=True
        )
    )
    return 0


def _load_dims(spec: str) -> costmodel.ModelDims:
    if spec in costmodel.PRESETS:
        return costmodel.PRESETS[spec]
    path = Path(spec)
    if not path.exists():
        raise ValidationError(
            f"--dims must be a preset ({', '.join(sorted(costmodel.PRESETS))}) "
            f"or a JSON file, got {spec!r}"
        )
    with open(path, "r", encoding="utf-8") as fh:
        return costmodel.ModelDims(**json.load(fh))


def cmd_cost(args) -> int:
    dims = _load_dims(args.dims)
    report = costmodel.end_to_end_report(
        L_org=args.context_len,
        L_q=args.query_len,
        L_a=args.answer_len,
        rate=args.rate,
        dims=dims,
        include_lsa=not args.no_lsa,
    )
    payload = report.to_dict(include_steps=not args.summary_only)
    print(json.dumps({k: v for k, v in payload.items()
                      if not k.endswith("_steps")}, sort_keys=True))
    if args.out:
        _write_json(args.out, payload)
        _write_manifest(args.out, "cost", args, [])
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxcomp",
        description="Context compression kernel, diagnostics, lab, and cost model.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_scope_flags(p):
        p.add_argument("--rate", type=int, required=False, default=32)
        p.add_argument(
            "--scope",
            choices=[realloc.SCOPE_REPRESENTATIVES, realloc.SCOPE_ALL_TOKENS],
            default=realloc.SCOPE_REPRESENTATIVES,
        )
        p.add_argument("--min-group", dest="min_group", type=int, default=1)
        p.add_argument("--threads", type=int, default=_default_threads())

    p = sub.add_parser("compress", help="compress a context against a query")
    p.add_argument("--context", required=True)
    p.add_argument("--query", required=True)
    add_scope_flags(p)
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("score", help="emit per-token and per-group gain records")
    p.add_argument("--context", required=True)
    p.add_argument("--query", required=True)
    add_scope_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("eval", help="AUC / redundancy diagnostics")
    ev = p.add_subparsers(dest="metric", required=True)
    pa = ev.add_parser("auc")
    pa.add_argument("--scores", required=True)
    pa.add_argument("--labels", required=True)
    pa.add_argument("--out")
    pa.set_defaults(func=cmd_eval)
    pr = ev.add_parser("redundancy")
    pr.add_argument("--emb", required=True)
    pr.add_argument("--scores")
    pr.add_argument("--ratio", type=float)
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_eval)

    p = sub.add_parser("lab", help="run seeded selection trials")
    p.add_argument("--config")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--summary-only", action="store_true")
    p.set_defaults(func=cmd_lab)

    p = sub.add_parser("cost", help="analytic FLOPs report")
    p.add_argument("--context-len", dest="context_len", type=int, required=True)
    p.add_argument("--query-len", dest="query_len", type=int, required=True)
    p.add_argument("--answer-len", dest="answer_len", type=int, required=True)
    p.add_argument("--rate", type=int, required=True)
    p.add_argument("--dims", default="7b")
    p.add_argument("--no-lsa", dest="no_lsa", action="store_true")
    p.add_argument("--out")
    p.add_argument("--summary-only", action="store_true")
    p.set_defaults(func=cmd_cost)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CtxcompError as exc:
        print(f"ctxcomp {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ctxcomp {args.command}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
