"""Command-line entry points: cluster, synth, metrics, report."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import fields

import numpy as np

from . import artifacts, hsi, metrics, report, slic, spgraph, synth
from .config import RunConfig, load_run_config
from .errors import ConfigInvalid, GFClusterError
from .optimize import save_params, train

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    defaults = RunConfig()
    for f in fields(RunConfig):
        flag = "--" + f.name.replace("_", "-")
        current = getattr(defaults, f.name)
        if isinstance(current, bool):
            group = parser.add_mutually_exclusive_group()
            group.add_argument(flag, dest=f.name, action="store_true", default=None)
            group.add_argument(
                "--no-" + f.name.replace("_", "-"),
                dest=f.name,
                action="store_false",
                default=None,
            )
        else:
            parser.add_argument(flag, dest=f.name, type=type(current), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gfcluster",
        description="Superpixel-graph clustering with adaptive spectral filtering "
        "and homophily-guided rewiring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_cluster = sub.add_parser("cluster", help="run the full pipeline on a cube")
    p_cluster.add_argument("--cube", required=True, help="raw float32 cube path")
    p_cluster.add_argument("--sidecar", required=True, help="cube sidecar JSON path")
    p_cluster.add_argument("--gt", default=None, help="raw uint16 ground-truth path")
    p_cluster.add_argument("--outdir", required=True)
    p_cluster.add_argument("--config", default=None, help="flat key=value config file")
    _add_run_flags(p_cluster)

    p_synth = sub.add_parser("synth", help="generate a synthetic labeled cube")
    p_synth.add_argument("--outdir", required=True)
    p_synth.add_argument("--height", type=int, default=64)
    p_synth.add_argument("--width", type=int, default=64)
    p_synth.add_argument("--bands", type=int, default=8)
    p_synth.add_argument("--classes", type=int, default=4)
    p_synth.add_argument("--noise", type=float, default=0.25)
    p_synth.add_argument("--separation", type=float, default=1.0)
    p_synth.add_argument("--seed", type=int, default=0)

    p_metrics = sub.add_parser("metrics", help="score one label map against another")
    p_metrics.add_argument("--pred", required=True, help=".csv, .pgm, or raw .u16 map")
    p_metrics.add_argument("--gt", required=True, help=".csv, .pgm, or raw .u16 map")
    p_metrics.add_argument("--height", type=int, default=None, help="raw map height")
    p_metrics.add_argument("--width", type=int, default=None, help="raw map width")
    p_metrics.add_argument("--out", default=None, help="metrics.json path")

    p_report = sub.add_parser("report", help="render figures from run artifacts")
    p_report.add_argument("--outdir", required=True, help="directory holding run CSVs")

    return parser


def _load_map(path, height, width) -> np.ndarray:
    if path.endswith(".csv"):
        return artifacts.read_label_csv(path)
    if path.endswith(".pgm"):
        return artifacts.read_pgm(path)
    if height is None or width is None:
        raise ConfigInvalid(f"raw map {path} needs --height and --width")
    return hsi.load_gt(path, height, width)


def cmd_cluster(args) -> int:
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig)}
    cfg = load_run_config(args.config, overrides)
    os.makedirs(args.outdir, exist_ok=True)

    cube = hsi.load_cube(args.cube, args.sidecar)
    gt = None
    if args.gt is not None:
        gt = hsi.load_gt(args.gt, cube.height, cube.width)

    clusters = cfg.clusters
    if clusters <= 0:
        if gt is None:
            raise ConfigInvalid("either --clusters or --gt must be supplied")
        clusters = int(np.unique(gt[gt > 0]).size)

    if cfg.ablate_v1:
        seg = slic.identity_segmentation(cube.height, cube.width)
    else:
        p = min(cfg.pca_components, cube.bands)
        reduced, _ = hsi.pca_reduce(cube, p)
        seg = slic.slic_segment(
            reduced,
            cfg.n_superpixels,
            compactness=cfg.compactness,
            iters=cfg.slic_iters,
            seed=cfg.seed,
        )
    qm = spgraph.build_assignment(seg)
    x = spgraph.project_to_nodes(cube, qm)
    graph = spgraph.build_adjacency(x, seg, t_hop=cfg.t_hop, rho=cfg.rho)

    result = train(graph, cfg.train_config(clusters))

    label_map = spgraph.backproject_labels(result.labels_kmeans, seg)
    artifacts.write_pgm(os.path.join(args.outdir, "labels.pgm"), label_map)
    artifacts.write_label_csv(os.path.join(args.outdir, "labels.csv"), label_map)
    artifacts.write_losses_csv(os.path.join(args.outdir, "losses.csv"), result.trace)
    artifacts.write_edits_csv(os.path.join(args.outdir, "edits.csv"), result.edits_log)
    artifacts.write_pgm(
        os.path.join(args.outdir, "segmentation.pgm"), seg.assignment % 256
    )
    artifacts.write_label_csv(
        os.path.join(args.outdir, "segmentation.csv"), seg.assignment
    )
    save_params(
        result.params,
        os.path.join(args.outdir, "params.bin"),
        os.path.join(args.outdir, "params.json"),
    )
    if cfg.dump_embedding:
        artifacts.write_matrix_csv(
            os.path.join(args.outdir, "embedding.csv"), result.z
        )

    manifest = cfg.as_dict()
    manifest.update(
        {
            "clusters": clusters,
            "cube": args.cube,
            "sidecar": args.sidecar,
            "gt": args.gt if args.gt else "",
            "outdir": args.outdir,
            "result_n_superpixels": seg.n_superpixels,
            "result_label_agreement": result.label_agreement,
            "result_diverged": result.diverged,
            "result_iterations_run": len(result.trace),
        }
    )
    artifacts.write_manifest(os.path.join(args.outdir, "manifest.txt"), manifest)

    if gt is not None:
        rep = metrics.compute_metrics(label_map, gt)
        payload = rep.as_dict()
        scatter = metrics.scatter_diagnostic(result.z, result.labels_kmeans)
        payload["scatter_intra"] = scatter.intra
        payload["scatter_inter"] = scatter.inter
        payload["label_agreement"] = result.label_agreement
        artifacts.write_metrics_json(os.path.join(args.outdir, "metrics.json"), payload)
        artifacts.write_metrics_csv(os.path.join(args.outdir, "metrics.csv"), rep)

    if cfg.figures:
        report.render_run_figures(args.outdir)

    if result.diverged:
        print("error (divergence): objective exceeded the guard; trace preserved", file=sys.stderr)
        return EXIT_DIVERGED
    return EXIT_OK


def cmd_synth(args) -> int:
    os.makedirs(args.outdir, exist_ok=True)
    cube, gt = synth.synth_cube(
        args.height,
        args.width,
        args.bands,
        args.classes,
        args.noise,
        args.separation,
        args.seed,
    )
    hsi.save_cube(
        cube,
        os.path.join(args.outdir, "cube.f32"),
        os.path.join(args.outdir, "cube.json"),
    )
    hsi.save_gt(gt, os.path.join(args.outdir, "gt.u16"))
    return EXIT_OK


def cmd_metrics(args) -> int:
    pred = _load_map(args.pred, args.height, args.width)
    gt = _load_map(args.gt, args.height, args.width)
    rep = metrics.compute_metrics(pred, gt)
    payload = rep.as_dict()
    out = args.out or "metrics.json"
    artifacts.write_metrics_json(out, payload)
    base, ext = os.path.splitext(out)
    artifacts.write_metrics_csv(base + ".csv" if ext == ".json" else out + ".csv", rep)
    print(
        f"oa={rep.oa:.4f} kappa={rep.kappa:.4f} nmi={rep.nmi:.4f} "
        f"ari={rep.ari:.4f} purity={rep.purity:.4f}"
    )
    return EXIT_OK


def cmd_report(args) -> int:
    written = report.render_run_figures(args.outdir)
    for path in written:
        print(path)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {
        "cluster": cmd_cluster,
        "synth": cmd_synth,
        "metrics": cmd_metrics,
        "report": cmd_report,
    }
    try:
        return handlers[args.command](args)
    except ConfigInvalid as exc:
        print(f"error (config): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GFClusterError as exc:
        print(f"error ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error (io): {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
