"""Trainer command line: build datasets, fit the scorer, evaluate weights."""

from __future__ import annotations

import logging
import pickle
from pathlib import Path

import click

from .data import LABEL_MODES, Dataset, build_dataset
from .evaluate import downstream_report, ranking_report
from .model import export_weights, load_exported
from .train import TrainConfig, train


@click.group()
@click.option("--seed", default=0, show_default=True)
@click.option("-v", "--verbose", is_flag=True)
@click.pass_context
def main(ctx, seed, verbose):
    """Train the attention scorer used by the pathcut solver."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)
    ctx.ensure_object(dict)
    ctx.obj["seed"] = seed


@main.command()
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option("--families", default="er,ba,ws,lattice", show_default=True)
@click.option("--count", default=10, show_default=True, help="Instances per family.")
@click.option("--n", default=250, show_default=True)
@click.option("--k-star", default=20, show_default=True)
@click.option("--label-mode", type=click.Choice(LABEL_MODES), default="cut_incidence")
@click.pass_context
def dataset(ctx, out_dir, families, count, n, k_star, label_mode):
    """Generate labeled instances through the solver CLI, pickle the dataset."""
    out_dir = Path(out_dir)
    merged = Dataset()
    for fam in families.split(","):
        ds = build_dataset(
            out_dir / fam, fam, count, n=n, k_star=k_star,
            label_mode=label_mode, seed=ctx.obj["seed"],
        )
        merged.instances += ds.instances
        merged.features += ds.features
        merged.labels += ds.labels
        merged.instance_paths += ds.instance_paths
    with open(out_dir / "dataset.pkl", "wb") as fh:
        pickle.dump(merged, fh)
    click.echo(f"wrote {out_dir / 'dataset.pkl'} ({len(merged)} instances)")


@main.command("train")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--out", "out_path", default="weights.json", show_default=True)
@click.option("--epochs", default=500, show_default=True)
@click.option("--lr", default=5e-3, show_default=True)
@click.option("--patience", default=250, show_default=True)
@click.option("--dropout", default=0.6, show_default=True)
@click.pass_context
def train_cmd(ctx, dataset_path, out_path, epochs, lr, patience, dropout):
    """Fit the scorer on a pickled dataset, export the portable weight file."""
    with open(dataset_path, "rb") as fh:
        ds: Dataset = pickle.load(fh)
    cfg = TrainConfig(
        epochs=epochs, lr=lr, early_stop_patience=patience,
        dropout=dropout, seed=ctx.obj["seed"],
    )
    model, history, best = train(ds, cfg)
    export_weights(
        model, out_path,
        metadata={"instances": len(ds), "epochs_run": len(history),
                  "held_out_loss": best, "seed": cfg.seed},
    )
    click.echo(
        f"wrote {out_path}: {len(history)} epochs, "
        f"train loss {history[0]:.4f} -> {history[-1]:.4f}, held-out {best:.4f}"
    )


@main.command("eval")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True))
@click.option("--weights", "weights_path", required=True, type=click.Path(exists=True))
@click.option("--downstream", is_flag=True, help="Also run solver-side comparisons.")
@click.option("--work-dir", default="eval-work", show_default=True)
@click.pass_context
def eval_cmd(ctx, dataset_path, weights_path, downstream, work_dir):
    """Report ranking metrics (and optionally downstream reduction)."""
    with open(dataset_path, "rb") as fh:
        ds: Dataset = pickle.load(fh)
    model = load_exported(weights_path, seed=ctx.obj["seed"])
    rep = ranking_report(model, ds)
    click.echo(f"roc_auc={rep.auc:.4f} precision@95={rep.precision_at_95:.4f}")
    if downstream:
        dr = downstream_report(weights_path, ds.instance_paths, work_dir, seed=ctx.obj["seed"])
        click.echo(
            f"reduction_pct median: gat={dr.gat_median:.1f} constant={dr.constant_median:.1f} "
            f"(valid {dr.gat_valid}/{len(dr.gat_reductions)} vs "
            f"{dr.constant_valid}/{len(dr.constant_reductions)})"
        )


if __name__ == "__main__":
    main()
