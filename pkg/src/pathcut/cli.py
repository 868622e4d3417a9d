"""Command-line interface.

Subcommands: gen, features, attack, bench, scaling, summarize.
Global flags: --seed, --threads, --out-dir.
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path as FilePath

import click

from . import graph as graph_mod
from .attack import InfeasibleError, baseline_greedy, pathattack
from .bench import (
    BENCH_COLUMNS,
    MethodSpec,
    SuiteConfig,
    load_suite_config,
    run_suite,
    scaling_run,
    summarize,
)
from .features import FAMILY_ORDER, assemble, save_csv
from .gat import load_weights
from .graph import EMPTY_MASK, EdgeMask, load_instance, save_edge_list, save_instance
from .grasp import GraspConfig, grasp_attack
from .paths import shortest_path
from .synthgen import GeneratorParams, generate, sample_instance


@click.group()
@click.option("--seed", default=0, show_default=True, help="Base RNG seed.")
@click.option("--threads", default=1, show_default=True, help="Worker processes for suites.")
@click.option("--out-dir", default=".", show_default=True, type=click.Path(file_okay=False))
@click.pass_context
def main(ctx, seed, threads, out_dir):
    """Force Path Cut toolkit: generators, features, attacks, benchmarks."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, threads=threads, out_dir=FilePath(out_dir))
    ctx.obj["out_dir"].mkdir(parents=True, exist_ok=True)


@main.command()
@click.option("--family", type=click.Choice(["lattice", "er", "ba", "ws"]), required=True)
@click.option("--n", default=1000, show_default=True)
@click.option("--p", default=0.014, show_default=True, help="ER edge probability.")
@click.option("--m", default=7, show_default=True, help="BA attachment count.")
@click.option("--k", default=12, show_default=True, help="WS ring neighbors.")
@click.option("--rows", default=30, show_default=True)
@click.option("--cols", default=30, show_default=True)
@click.option("--k-star", default=100, show_default=True, help="Rank of the target path.")
@click.option("--prefix", default="instance", show_default=True)
@click.pass_context
def gen(ctx, family, n, p, m, k, rows, cols, k_star, prefix):
    """Generate a synthetic graph + instance (edge-list TSV and JSON)."""
    params = GeneratorParams(
        family, n=n, p=p, m=m, k=k, rows=rows, cols=cols, seed=ctx.obj["seed"]
    )
    g = generate(params)
    query = sample_instance(g, k_star, seed=ctx.obj["seed"])
    out_dir = ctx.obj["out_dir"]
    graph_path = out_dir / f"{prefix}.tsv"
    instance_path = out_dir / f"{prefix}.json"
    save_edge_list(g, graph_path)
    save_instance(g, query, graph_path.name, instance_path)
    click.echo(
        f"wrote {graph_path} ({g.node_count} nodes, {g.edge_count} edges) "
        f"and {instance_path} (|p*| = {len(query.target_path.nodes) - 1} edges)"
    )


@main.command()
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option("--families", default="structural,flow,ppr", show_default=True)
@click.option("--restart", default=0.15, show_default=True, help="PPR restart probability.")
@click.option("--katz-alpha", default=None, type=float)
@click.option("--raw", is_flag=True, help="Skip per-column z-scoring.")
@click.option("--out", "out_path", default="features.csv", show_default=True)
@click.pass_context
def features(ctx, instance_path, families, restart, katz_alpha, raw, out_path):
    """Compute the node-feature matrix for an instance, write CSV."""
    g, query = load_instance(instance_path)
    fams = frozenset(families.split(","))
    bad = fams - set(FAMILY_ORDER)
    if bad:
        raise click.BadParameter(f"unknown families {sorted(bad)}")
    fm = assemble(
        g, query, families=fams, restart=restart, katz_alpha=katz_alpha, normalize=not raw
    )
    save_csv(fm, ctx.obj["out_dir"] / out_path)
    click.echo(f"wrote {ctx.obj['out_dir'] / out_path} ({fm.values.shape[0]}x{fm.values.shape[1]})")


@main.command()
@click.option("--instance", "instance_path", required=True, type=click.Path(exists=True))
@click.option(
    "--method",
    type=click.Choice(["pathattack", "baseline", "grasp"]),
    default="pathattack",
    show_default=True,
)
@click.option("--cover", type=click.Choice(["greedy", "lp"]), default="greedy", show_default=True)
@click.option("--scorer", type=click.Choice(["gat", "detour", "constant"]), default="detour")
@click.option("--weights", "weights_path", type=click.Path(exists=True), default=None)
@click.option("--start-pct", default=95.0, show_default=True)
@click.option("--decrement", default=10.0, show_default=True)
@click.option("--strict-unique", is_flag=True)
@click.option("--dump-lp", "dump_lp_path", type=click.Path(), default=None)
@click.option("--trace", "trace_path", type=click.Path(), default=None, help="JSONL GRASP trace.")
@click.option("--out", "out_path", default="results.csv", show_default=True)
@click.pass_context
def attack(
    ctx,
    instance_path,
    method,
    cover,
    scorer,
    weights_path,
    start_pct,
    decrement,
    strict_unique,
    dump_lp_path,
    trace_path,
    out_path,
):
    """Run one solver on one instance, write a result CSV row."""
    g, query = load_instance(instance_path)
    seed = ctx.obj["seed"]
    feature_time_ms = 0.0
    final_threshold = ""
    try:
        if method == "baseline":
            res = baseline_greedy(g, EMPTY_MASK, query)
        elif method == "pathattack":
            res = pathattack(
                g,
                EMPTY_MASK,
                query,
                cover_backend=cover,
                seed=seed,
                strict_unique=strict_unique,
                lp_dump_path=dump_lp_path,
            )
        else:
            cfg = GraspConfig(
                start_percentile=start_pct,
                decrement=decrement,
                scorer=scorer,
                cover_backend=cover,
                strict=strict_unique,
                seed=seed,
            )
            weights = load_weights(weights_path) if weights_path else None
            res, trace = grasp_attack(g, query, cfg, weights)
            feature_time_ms = trace.feature_time_ms
            final_threshold = trace.iterations[-1].threshold
            if trace_path:
                import json

                with open(trace_path, "w") as fh:
                    for it in trace.iterations:
                        fh.write(
                            json.dumps(
                                {
                                    "threshold": it.threshold,
                                    "subgraph_nodes": it.subgraph_nodes,
                                    "subgraph_edges": it.subgraph_edges,
                                    "cumulative_deleted": sorted(it.cumulative_deleted),
                                    "valid": it.valid,
                                }
                            )
                            + "\n"
                        )
    except InfeasibleError as exc:
        click.echo(f"infeasible: {exc}", err=True)
        sys.exit(2)
    sp = shortest_path(g, EdgeMask.of(res.cut_edges), query)
    revalid = sp is not None and sp.nodes == query.target_path.nodes
    out_file = ctx.obj["out_dir"] / out_path
    with open(out_file, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(BENCH_COLUMNS + ["cut_edges"])
        writer.writerow(
            [
                FilePath(instance_path).stem,
                "file",
                g.node_count,
                g.edge_count,
                method,
                scorer if method == "grasp" else "",
                "",
                cover if method != "baseline" else "",
                seed,
                len(res.cut_edges),
                res.total_cost,
                bool(res.valid and revalid),
                res.wall_time_ms,
                feature_time_ms,
                res.subproblem_edges,
                100.0 * (1.0 - res.subproblem_edges / g.edge_count)
                if method == "grasp" and g.edge_count
                else 0.0,
                res.pathattack_calls,
                final_threshold,
                "",
                ";".join(str(e) for e in sorted(res.cut_edges)),
            ]
        )
    click.echo(
        f"{method}: cut {len(res.cut_edges)} edges (cost {res.total_cost:g}), "
        f"valid={bool(res.valid and revalid)}; wrote {out_file}"
    )


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--families", default="lattice,er,ba,ws", show_default=True)
@click.option("--n", default=1000, show_default=True)
@click.option("--instances", default=15, show_default=True)
@click.option("--k-star", default=100, show_default=True)
@click.option("--out", "out_path", default="bench.csv", show_default=True)
@click.pass_context
def bench(ctx, config_path, families, n, instances, k_star, out_path):
    """Run a benchmark suite (baseline, pathattack, grasp) to CSV."""
    if config_path:
        suite = load_suite_config(config_path)
        suite.threads = max(suite.threads, ctx.obj["threads"])
    else:
        fams = []
        for fam in families.split(","):
            if fam == "lattice":
                side = max(2, int(round(n ** 0.5)))
                fams.append(GeneratorParams("lattice", rows=side, cols=side))
            else:
                fams.append(GeneratorParams(fam, n=n))
        suite = SuiteConfig(
            families=fams,
            instances=instances,
            k_star=k_star,
            seed=ctx.obj["seed"],
            threads=ctx.obj["threads"],
        )
    out_file = ctx.obj["out_dir"] / out_path
    df = run_suite(suite, out_file)
    click.echo(f"wrote {out_file} ({len(df)} rows)")


@main.command()
@click.option("--sizes", default="500,1000,2000", show_default=True)
@click.option("--k-star", default=100, show_default=True)
@click.option("--instances", default=3, show_default=True)
@click.option("--scorer", type=click.Choice(["gat", "detour", "constant"]), default="detour")
@click.option("--weights", "weights_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_path", default="scaling.csv", show_default=True)
@click.pass_context
def scaling(ctx, sizes, k_star, instances, scorer, weights_path, out_path):
    """Sweep BA (m=7) graph sizes with a fixed scorer."""
    size_list = [int(s) for s in sizes.split(",")]
    out_file = ctx.obj["out_dir"] / out_path
    df = scaling_run(
        size_list,
        out_file,
        k_star=k_star,
        seed=ctx.obj["seed"],
        instances=instances,
        scorer=scorer,
        weights_path=weights_path or "",
        threads=ctx.obj["threads"],
    )
    click.echo(f"wrote {out_file} ({len(df)} rows)")


@main.command("summarize")
@click.option("--csv", "csv_path", required=True, type=click.Path(exists=True))
@click.pass_context
def summarize_cmd(ctx, csv_path):
    """Summarize a benchmark CSV: medians/IQRs plus SVG plots."""
    summary = summarize(csv_path, ctx.obj["out_dir"])
    if summary.empty:
        click.echo("empty CSV: wrote empty summary, no plots")
    else:
        click.echo(summary.to_string(index=False))


if __name__ == "__main__":
    main()
