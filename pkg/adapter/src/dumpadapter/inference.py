"""Run a sequence-classification checkpoint over a dataset and dump outputs.

The prediction dump is NDJSON with one ``{"id", "logits", "label"}`` object
per input, in dataset order. Logits are emitted raw (not softmaxed) so that
any temperature handling stays with the consumer. With an embeddings path, a
sibling NDJSON of ``{"id", "embedding"}`` is written, where the embedding is
the attention-masked mean of the encoder's final hidden states.
"""

from __future__ import annotations

import json
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

import torch
from transformers import AutoModelForSequenceClassification, AutoTokenizer


@dataclass(frozen=True)
class DatasetRow:
    id: str
    text: str
    text_pair: str | None
    label: int


@dataclass(frozen=True)
class DumpJob:
    checkpoint: str
    dataset: str
    out: str
    batch_size: int = 8
    embeddings_out: str | None = None


class AdapterError(Exception):
    """Raised for failures that abort the whole dump (bad checkpoint/dataset)."""


def load_dataset(path: str | Path) -> list[DatasetRow]:
    """Parse an NDJSON dataset: {"id", "text", ["text_pair"], "label"}."""
    rows = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AdapterError(f"line {lineno}: invalid JSON: {exc}") from exc
            try:
                rows.append(
                    DatasetRow(
                        id=str(raw["id"]),
                        text=raw["text"],
                        text_pair=raw.get("text_pair"),
                        label=int(raw["label"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise AdapterError(f"line {lineno}: bad dataset row: {exc}") from exc
    if not rows:
        raise AdapterError(f"dataset {path} contains no rows")
    return rows


def _load_model(checkpoint: str):
    try:
        tokenizer = AutoTokenizer.from_pretrained(checkpoint)
        model = AutoModelForSequenceClassification.from_pretrained(checkpoint)
    except Exception as exc:  # transformers raises many concrete types here
        raise AdapterError(f"cannot load checkpoint {checkpoint!r}: {exc}") from exc
    model.eval()
    return tokenizer, model


def _mean_pool(hidden: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
    mask = mask.unsqueeze(-1).to(hidden.dtype)
    summed = (hidden * mask).sum(dim=1)
    counts = mask.sum(dim=1).clamp(min=1.0)
    return summed / counts


def dump_predictions(job: DumpJob) -> int:
    """Write the prediction dump (and optional embedding dump); returns the
    number of rows emitted. Rows whose tokenization fails are skipped with a
    warning naming the row id; everything else is emitted in dataset order."""
    if job.batch_size < 1:
        raise AdapterError(f"batch size must be >= 1, got {job.batch_size}")
    rows = load_dataset(job.dataset)
    tokenizer, model = _load_model(job.checkpoint)

    emitted = 0
    out_path = Path(job.out)
    emb_path = Path(job.embeddings_out) if job.embeddings_out else None
    emb_handle = emb_path.open("w", encoding="utf-8") if emb_path else None
    try:
        with out_path.open("w", encoding="utf-8") as out_handle, torch.no_grad():
            for start in range(0, len(rows), job.batch_size):
                batch = rows[start : start + job.batch_size]
                kept = []
                texts = []
                pairs = []
                for row in batch:
                    try:
                        if not isinstance(row.text, str) or (
                            row.text_pair is not None
                            and not isinstance(row.text_pair, str)
                        ):
                            raise TypeError("text fields must be strings")
                        kept.append(row)
                        texts.append(row.text)
                        pairs.append(row.text_pair)
                    except (TypeError, ValueError) as exc:
                        warnings.warn(f"skipping id={row.id}: {exc}", stacklevel=2)
                if not kept:
                    continue
                use_pairs = any(p is not None for p in pairs)
                encoded = tokenizer(
                    texts,
                    text_pair=[p or "" for p in pairs] if use_pairs else None,
                    padding=True,
                    truncation=True,
                    return_tensors="pt",
                )
                outputs = model(**encoded, output_hidden_states=emb_handle is not None)
                logits = outputs.logits.double()
                for i, row in enumerate(kept):
                    record = {
                        "id": row.id,
                        "logits": [float(v) for v in logits[i]],
                        "label": row.label,
                    }
                    out_handle.write(json.dumps(record, sort_keys=True) + "\n")
                    emitted += 1
                if emb_handle is not None:
                    pooled = _mean_pool(
                        outputs.hidden_states[-1].double(),
                        encoded["attention_mask"],
                    )
                    for i, row in enumerate(kept):
                        emb_handle.write(
                            json.dumps(
                                {"id": row.id, "embedding": [float(v) for v in pooled[i]]},
                                sort_keys=True,
                            )
                            + "\n"
                        )
    finally:
        if emb_handle is not None:
            emb_handle.close()
    if emitted == 0:
        print("warning: no rows emitted", file=sys.stderr)
    return emitted
