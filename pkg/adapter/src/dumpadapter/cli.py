"""Command line for the dump adapter."""

from __future__ import annotations

import sys

import click

from . import __version__
from .inference import AdapterError, DumpJob, dump_predictions


@click.group()
@click.version_option(version=__version__, prog_name="dumpadapter")
def main():
    """Run a classification checkpoint over a dataset and dump NDJSON outputs."""


@main.command()
@click.option("--checkpoint", required=True, help="Model checkpoint path or name.")
@click.option("--dataset", required=True, type=click.Path(exists=True, dir_okay=False),
              help="NDJSON dataset: one {id, text[, text_pair], label} per line.")
@click.option("--out", required=True, type=click.Path(dir_okay=False),
              help="Prediction dump path ({id, logits, label} per line).")
@click.option("--batch", type=int, default=8, show_default=True, help="Batch size.")
@click.option("--embeddings", type=click.Path(dir_okay=False), default=None,
              help="Also write {id, embedding} NDJSON to this path.")
def dump(checkpoint, dataset, out, batch, embeddings):
    """Emit raw logits (never softmaxed) for every dataset row, in order."""
    job = DumpJob(
        checkpoint=checkpoint,
        dataset=dataset,
        out=out,
        batch_size=batch,
        embeddings_out=embeddings,
    )
    try:
        emitted = dump_predictions(job)
    except AdapterError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    click.echo(f"emitted={emitted} out={out}")


if __name__ == "__main__":
    main()
