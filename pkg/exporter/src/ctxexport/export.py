"""Hidden-state and label extraction from a causal language model.

Context and query texts are tokenized, run through the model, and the
hidden states of a chosen layer (last by default) are written as one
row per token.  Segment labels mark which fixed-size context segments
contain a given answer string.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import torch
from transformers import AutoModelForCausalLM, AutoTokenizer

from . import cemb
from .errors import ValidationError

LABEL_RULE = (
    "label 1 iff the segment's detokenized text contains the answer string, "
    "both lowercased with whitespace collapsed"
)


@dataclass(frozen=True)
class ExportSpec:
    model: str
    context_text: str
    query_text: str
    answer_text: Optional[str] = None
    max_length: int = 512
    segment_size: int = 8
    layer: int = -1
    encode_mode: str = "joint"

    def __post_init__(self):
        if not self.context_text.strip():
            raise ValidationError("context text is empty")
        if not self.query_text.strip():
            raise ValidationError("query text is empty")
        if self.max_length < 1:
            raise ValidationError(f"max_length must be >= 1, got {self.max_length}")
        if self.segment_size < 1:
            raise ValidationError(
                f"segment_size must be >= 1, got {self.segment_size}"
            )
        if self.encode_mode not in ("joint", "separate"):
            raise ValidationError(
                f"encode_mode must be 'joint' or 'separate', got {self.encode_mode!r}"
            )


@dataclass
class ExportReport:
    context_rows: int
    query_rows: int
    dim: int
    layer: int
    encode_mode: str
    context_tokens_dropped: int
    query_tokens_dropped: int
    warnings: List[str] = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def load_model(spec: ExportSpec):
    tokenizer = AutoTokenizer.from_pretrained(spec.model)
    model = AutoModelForCausalLM.from_pretrained(spec.model)
    model.eval()
    return tokenizer, model


def _encode(tokenizer, text: str, what: str) -> List[int]:
    ids = tokenizer(text, add_special_tokens=False)["input_ids"]
    if not ids:
        raise ValidationError(f"{what} text produced no tokens")
    return ids


def _token_budget(spec: ExportSpec, tokenizer) -> Tuple[List[int], List[int], int, int]:
    """Tokenize both texts and apply the max-length budget.

    Returns (context_ids, query_ids, context_dropped, query_dropped).
    Truncation keeps the leftmost tokens and is always reported.
    """
    ctx = _encode(tokenizer, spec.context_text, "context")
    qry = _encode(tokenizer, spec.query_text, "query")
    ctx_drop = qry_drop = 0
    if spec.encode_mode == "joint":
        if len(qry) > spec.max_length:
            raise ValidationError(
                f"query alone has {len(qry)} tokens, over max_length "
                f"{spec.max_length}; cannot encode jointly"
            )
        budget = spec.max_length - len(qry)
        if len(ctx) > budget:
            if budget < 1:
                raise ValidationError(
                    "joint encoding leaves no room for any context token"
                )
            ctx_drop = len(ctx) - budget
            ctx = ctx[:budget]
    else:
        if len(ctx) > spec.max_length:
            ctx_drop = len(ctx) - spec.max_length
            ctx = ctx[: spec.max_length]
        if len(qry) > spec.max_length:
            qry_drop = len(qry) - spec.max_length
            qry = qry[: spec.max_length]
    return ctx, qry, ctx_drop, qry_drop


def _hidden(model, ids: List[int], layer: int) -> torch.Tensor:
    with torch.no_grad():
        out = model(
            input_ids=torch.tensor([ids], dtype=torch.long),
            output_hidden_states=True,
        )
    states = out.hidden_states
    n = len(states)
    if not -n <= layer < n:
        raise ValidationError(
            f"layer {layer} out of range for a model with {n} hidden-state layers"
        )
    return states[layer][0]


def export_hidden_states(
    spec: ExportSpec, context_path, query_path, loaded=None
) -> ExportReport:
    tokenizer, model = loaded if loaded is not None else load_model(spec)
    ctx, qry, ctx_drop, qry_drop = _token_budget(spec, tokenizer)

    if spec.encode_mode == "joint":
        joint = _hidden(model, ctx + qry, spec.layer)
        ctx_h = joint[: len(ctx)]
        qry_h = joint[len(ctx) :]
    else:
        ctx_h = _hidden(model, ctx, spec.layer)
        qry_h = _hidden(model, qry, spec.layer)

    cemb.write_cemb(context_path, cemb.ROLE_CONTEXT, ctx_h.numpy())
    cemb.write_cemb(query_path, cemb.ROLE_QUERY, qry_h.numpy())

    report = ExportReport(
        context_rows=len(ctx),
        query_rows=len(qry),
        dim=int(ctx_h.shape[1]),
        layer=spec.layer,
        encode_mode=spec.encode_mode,
        context_tokens_dropped=ctx_drop,
        query_tokens_dropped=qry_drop,
    )
    if ctx_drop:
        report.warnings.append(f"context truncated: {ctx_drop} tokens dropped")
    if qry_drop:
        report.warnings.append(f"query truncated: {qry_drop} tokens dropped")
    return report


def _normalize(text: str) -> str:
    return " ".join(text.lower().split())


def export_labels(spec: ExportSpec, loaded=None) -> dict:
    if spec.answer_text is None or not spec.answer_text.strip():
        raise ValidationError("labeling requires a non-empty answer text")
    tokenizer = (loaded[0] if loaded is not None else load_model(spec)[0])
    ctx, _, ctx_drop, _ = _token_budget(spec, tokenizer)

    answer = _normalize(spec.answer_text)
    labels = []
    for start in range(0, len(ctx), spec.segment_size):
        segment = tokenizer.decode(ctx[start : start + spec.segment_size])
        labels.append(1 if answer in _normalize(segment) else 0)
    assert len(labels) == math.ceil(len(ctx) / spec.segment_size)

    result = {
        "rule": LABEL_RULE,
        "segment_size": spec.segment_size,
        "num_context_tokens": len(ctx),
        "context_tokens_dropped": ctx_drop,
        "answer_found": any(labels),
        "labels": labels,
    }
    if not any(labels):
        result["warning"] = "answer not found in any segment; labels are all zero"
    return result
