"""Command-line entry point orchestrating the pipeline stages.

Each stage reads and writes JSON artifacts so stages can run independently;
``run-all`` chains ingest, grouping, clustering, graph assembly, evaluation
and the report rendering in one pass, recording a manifest with the
effective configuration, its hash and input checksums.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from pathlib import Path

from . import __version__
from .clustering import cluster_all_pairs, load_cluster_map, save_cluster_map
from .config import PipelineConfig, merge_config, parse_config_file
from .embeddings import open_gateway
from .errors import PipelineError
from .evaluation import (
    GroundTruth,
    build_report,
    compute_metrics,
    map_all_edges,
)
from .graph import (
    apply_thresholds,
    assemble_network,
    classify_meta_actants,
    export_network,
    load_network,
)
from .grouping import GroupingConfig, GroupingResult, form_groups, score_matrix
from .report import load_json, render_all
from .synth import (
    HiddenNarrative,
    SynthConfig,
    derive_ground_truth,
    generate_corpus,
    synthetic_embeddings,
    write_tuple_file,
)
from .tuples import RelationIndex, build_relation_index, filter_and_dedup, load_tuples
from .embeddings import write_embedding_file


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(
    path: Path, stage: str, config: PipelineConfig, inputs: list[Path], artifacts: list[Path]
) -> None:
    manifest = {
        "stage": stage,
        "version": __version__,
        "config": config.to_dict(),
        "config_hash": config.config_hash(),
        "inputs": {
            str(p): _sha256_file(p) for p in sorted(set(inputs)) if p.exists()
        },
        "artifacts": sorted(str(p) for p in artifacts),
    }
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _require_file(parser: argparse.ArgumentParser, flag: str, value: str | None) -> Path:
    if value is None:
        parser.error(f"{flag} is required")
    path = Path(value)
    if not path.exists():
        parser.error(f"{flag}: no such file: {path}")
    return path


def _require_input(parser, flag: str, value: str | None) -> str:
    """Like _require_file but passes URLs through untouched."""
    if value is None:
        parser.error(f"{flag} is required")
    if value.startswith(("http://", "https://")):
        return value
    _require_file(parser, flag, value)
    return value


# -- stage implementations --------------------------------------------------


def _stage_ingest(
    config: PipelineConfig, tuples_path: Path, out: Path
) -> tuple[RelationIndex, int]:
    corpus = load_tuples(tuples_path)
    filtered, vocabulary = filter_and_dedup(corpus, config.min_count)
    index = build_relation_index(filtered, vocabulary)
    index.save(out)
    return index, len(corpus.skipped)


def _stage_emg(config: PipelineConfig, index: RelationIndex, out: Path) -> GroupingResult:
    grouping_config = GroupingConfig(
        gamma=config.gamma,
        alpha_percentile=config.alpha_percentile,
        beta=config.beta,
        alpha_override=config.alpha_override,
    )
    matrix = score_matrix(index, grouping_config)
    grouping = form_groups(matrix, index, grouping_config)
    grouping.save(out, scores=matrix, config=grouping_config)
    return grouping


def _stage_iarc(
    config: PipelineConfig,
    index: RelationIndex,
    grouping: GroupingResult,
    out: Path,
    emit_centroids: bool = False,
):
    gateway = open_gateway(config.embeddings)
    clusters = cluster_all_pairs(
        grouping,
        index,
        gateway,
        k_max=config.k_max,
        min_dispersion=config.min_dispersion,
        seed=config.seed,
    )
    save_cluster_map(
        out,
        clusters,
        seed=config.seed,
        k_max=config.k_max,
        min_dispersion=config.min_dispersion,
        emit_centroids=emit_centroids,
    )
    return clusters


def _stage_graph(
    config: PipelineConfig,
    grouping: GroupingResult,
    clusters,
    gt: GroundTruth | None,
    out: Path,
    format: str,
    keep_pruned: bool = False,
):
    net = assemble_network(grouping, clusters)
    net = apply_thresholds(
        net,
        verified_min=config.verified_min,
        unverified_min=config.unverified_min,
        gt=gt,
        keep_pruned=keep_pruned,
    )
    net = classify_meta_actants(net)
    out.write_bytes(export_network(net, format))
    return net


def _stage_eval(
    config: PipelineConfig,
    grouping: GroupingResult,
    clusters,
    gt: GroundTruth,
    report_path: Path,
) -> dict:
    gateway = open_gateway(config.embeddings)
    mapping, alignment = map_all_edges(
        grouping,
        gt,
        clusters,
        gateway,
        sim_min=config.sim_min,
        dispersion_min=config.min_dispersion,
    )
    metrics = compute_metrics(mapping, gt, clusters)
    report = build_report(
        mapping, alignment, gt, clusters, metrics, config.sim_min, config.min_dispersion
    )
    report_path.write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return report


# -- argument parsing --------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value settings file")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actantgraph",
        description="Aggregate noisy review relationship tuples into a consensus narrative network.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="stage", required=True)

    p = sub.add_parser("ingest", help="load, filter and index a tuple file")
    _add_common(p)
    p.add_argument("--tuples", help="JSON-lines tuple file")
    p.add_argument("--min-count", type=int, dest="min_count")
    p.add_argument("--out", required=True, help="relation index output path")

    p = sub.add_parser("emg", help="group entity mentions into actants")
    _add_common(p)
    p.add_argument("--index", help="relation index from ingest")
    p.add_argument("--gamma", type=int)
    p.add_argument("--alpha-percentile", type=float, dest="alpha_percentile")
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha", type=float, dest="alpha_override")
    p.add_argument("--out", required=True, help="groups output path")

    p = sub.add_parser("iarc", help="cluster inter-actant relationship phrases")
    _add_common(p)
    p.add_argument("--index", help="relation index from ingest")
    p.add_argument("--groups", help="groups from emg")
    p.add_argument("--embeddings", help="embedding file path or service URL")
    p.add_argument("--min-dispersion", type=float, dest="min_dispersion")
    p.add_argument("--k-max", type=int, dest="k_max")
    p.add_argument("--seed", type=int)
    p.add_argument("--emit-centroids", action="store_true")
    p.add_argument("--out", required=True, help="clusters output path")

    p = sub.add_parser("graph", help="assemble and export the narrative network")
    _add_common(p)
    p.add_argument("--groups", help="groups from emg")
    p.add_argument("--clusters", help="clusters from iarc")
    p.add_argument("--ground-truth", dest="ground_truth")
    p.add_argument("--verified-min", type=int, dest="verified_min")
    p.add_argument("--unverified-min", type=int, dest="unverified_min")
    p.add_argument("--format", choices=["dot", "json"], default="json")
    p.add_argument("--keep-pruned", action="store_true")
    p.add_argument("--out", required=True)

    p = sub.add_parser("eval", help="score clusters against a ground-truth graph")
    _add_common(p)
    p.add_argument("--clusters", help="clusters from iarc")
    p.add_argument("--groups", help="groups from emg")
    p.add_argument("--ground-truth", dest="ground_truth")
    p.add_argument("--embeddings", help="embedding file path or service URL")
    p.add_argument("--sim-min", type=float, dest="sim_min")
    p.add_argument("--dispersion-min", type=float, dest="min_dispersion")
    p.add_argument("--report", required=True, help="evaluation report output path")

    p = sub.add_parser("synth", help="generate a synthetic corpus from a hidden model")
    _add_common(p)
    p.add_argument("--model", help="hidden narrative JSON")
    p.add_argument("--n-reviews", type=int, dest="n_reviews", default=3000)
    p.add_argument("--tuples-min", type=int, dest="tuples_min", default=2)
    p.add_argument("--tuples-max", type=int, dest="tuples_max", default=6)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--seed", type=int)
    p.add_argument("--embedding-dim", type=int, dest="embedding_dim", default=32)
    p.add_argument("--out-tuples", required=True)
    p.add_argument("--out-embeddings", required=True)
    p.add_argument("--out-answer", required=True)
    p.add_argument("--out-ground-truth", dest="out_ground_truth")

    p = sub.add_parser("report", help="render figures and CSV tables from artifacts")
    _add_common(p)
    p.add_argument("--groups")
    p.add_argument("--clusters")
    p.add_argument("--graph", dest="graph_doc", help="network JSON from graph")
    p.add_argument("--eval-report", dest="eval_report")
    p.add_argument("--out-dir", required=True)

    p = sub.add_parser("run-all", help="run ingest through eval and the report")
    _add_common(p)
    p.add_argument("--tuples")
    p.add_argument("--embeddings")
    p.add_argument("--ground-truth", dest="ground_truth")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--min-count", type=int, dest="min_count")
    p.add_argument("--gamma", type=int)
    p.add_argument("--alpha-percentile", type=float, dest="alpha_percentile")
    p.add_argument("--alpha", type=float, dest="alpha_override")
    p.add_argument("--beta", type=float)
    p.add_argument("--k-max", type=int, dest="k_max")
    p.add_argument("--min-dispersion", type=float, dest="min_dispersion")
    p.add_argument("--sim-min", type=float, dest="sim_min")
    p.add_argument("--verified-min", type=int, dest="verified_min")
    p.add_argument("--unverified-min", type=int, dest="unverified_min")
    p.add_argument("--seed", type=int)

    return parser


_CONFIG_KEYS = {
    "tuples",
    "embeddings",
    "ground_truth",
    "out_dir",
    "min_count",
    "gamma",
    "alpha_percentile",
    "alpha_override",
    "beta",
    "k_max",
    "min_dispersion",
    "sim_min",
    "verified_min",
    "unverified_min",
    "seed",
}


def _build_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> PipelineConfig:
    file_values: dict = {}
    if getattr(args, "config", None):
        config_path = _require_file(parser, "--config", args.config)
        file_values = parse_config_file(config_path)
    flag_values = {
        key: value for key, value in vars(args).items() if key in _CONFIG_KEYS
    }
    return merge_config(file_values, flag_values)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _build_config(parser, args)
    try:
        return _dispatch(parser, args, config)
    except PipelineError as exc:
        print(f"error: {args.stage}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {args.stage}: {exc}", file=sys.stderr)
        return 1


def _dispatch(parser, args, config: PipelineConfig) -> int:
    stage = args.stage

    if stage == "ingest":
        tuples_path = _require_file(parser, "--tuples", config.tuples)
        out = Path(args.out)
        index, skipped = _stage_ingest(config, tuples_path, out)
        _write_manifest(
            out.with_name(out.stem + ".manifest.json"), stage, config, [tuples_path], [out]
        )
        print(
            f"ingest: {len(index.vocabulary)} mentions, "
            f"{index.total_instances()} relation instances, "
            f"{skipped} lines skipped -> {out}"
        )
        return 0

    if stage == "emg":
        index_path = _require_file(parser, "--index", args.index)
        index = RelationIndex.load(index_path)
        out = Path(args.out)
        grouping = _stage_emg(config, index, out)
        _write_manifest(
            out.with_name(out.stem + ".manifest.json"), stage, config, [index_path], [out]
        )
        print(f"emg: {len(grouping.groups)} groups -> {out}")
        return 0

    if stage == "iarc":
        index_path = _require_file(parser, "--index", args.index)
        groups_path = _require_file(parser, "--groups", args.groups)
        _require_input(parser, "--embeddings", config.embeddings)
        index = RelationIndex.load(index_path)
        grouping = GroupingResult.load(groups_path)
        out = Path(args.out)
        clusters = _stage_iarc(config, index, grouping, out, args.emit_centroids)
        _write_manifest(
            out.with_name(out.stem + ".manifest.json"),
            stage,
            config,
            [index_path, groups_path],
            [out],
        )
        print(f"iarc: {len(clusters)} actant pairs clustered -> {out}")
        return 0

    if stage == "graph":
        groups_path = _require_file(parser, "--groups", args.groups)
        clusters_path = _require_file(parser, "--clusters", args.clusters)
        grouping = GroupingResult.load(groups_path)
        clusters = load_cluster_map(clusters_path)
        gt = None
        if config.ground_truth:
            gt_path = _require_file(parser, "--ground-truth", config.ground_truth)
            gt = GroundTruth.load(gt_path)
        out = Path(args.out)
        net = _stage_graph(
            config, grouping, clusters, gt, out, args.format, args.keep_pruned
        )
        inputs = [groups_path, clusters_path]
        if config.ground_truth:
            inputs.append(Path(config.ground_truth))
        _write_manifest(
            out.with_name(out.stem + ".manifest.json"), stage, config, inputs, [out]
        )
        print(
            f"graph: {len(net.nodes)} nodes, {len(net.active_edges())} edges -> {out}"
        )
        return 0

    if stage == "eval":
        groups_path = _require_file(parser, "--groups", args.groups)
        clusters_path = _require_file(parser, "--clusters", args.clusters)
        gt_path = _require_file(parser, "--ground-truth", config.ground_truth)
        _require_input(parser, "--embeddings", config.embeddings)
        grouping = GroupingResult.load(groups_path)
        clusters = load_cluster_map(clusters_path)
        gt = GroundTruth.load(gt_path)
        report_path = Path(args.report)
        report = _stage_eval(config, grouping, clusters, gt, report_path)
        _write_manifest(
            report_path.with_name(report_path.stem + ".manifest.json"),
            stage,
            config,
            [groups_path, clusters_path, gt_path],
            [report_path],
        )
        metrics = report["metrics"]
        print(
            "eval: recall {recall_pct:.2f}%, edge detection {edge_detection_rate_pct:.2f}% "
            "-> {out}".format(out=report_path, **metrics)
        )
        return 0

    if stage == "synth":
        model_path = _require_file(parser, "--model", args.model)
        hidden = HiddenNarrative.load(model_path)
        synth_config = SynthConfig(
            n_reviews=args.n_reviews,
            tuples_min=args.tuples_min,
            tuples_max=args.tuples_max,
            noise_rate=args.noise,
            seed=config.seed if args.seed is None else args.seed,
            embedding_dim=args.embedding_dim,
        )
        corpus, answer = generate_corpus(hidden, synth_config)
        out_tuples = Path(args.out_tuples)
        out_embeddings = Path(args.out_embeddings)
        out_answer = Path(args.out_answer)
        write_tuple_file(corpus, out_tuples)
        dim, records = synthetic_embeddings(hidden, synth_config)
        write_embedding_file(out_embeddings, dim, records)
        answer.save(out_answer)
        artifacts = [out_tuples, out_embeddings, out_answer]
        if args.out_ground_truth:
            gt_path = Path(args.out_ground_truth)
            derive_ground_truth(hidden).save(gt_path)
            artifacts.append(gt_path)
        _write_manifest(
            out_tuples.with_name(out_tuples.stem + ".manifest.json"),
            stage,
            config,
            [model_path],
            artifacts,
        )
        print(f"synth: {len(corpus)} tuples -> {out_tuples}")
        return 0

    if stage == "report":
        out_dir = Path(args.out_dir)
        groups_doc = load_json(_require_file(parser, "--groups", args.groups)) if args.groups else None
        clusters_doc = (
            load_json(_require_file(parser, "--clusters", args.clusters))
            if args.clusters
            else None
        )
        net = (
            load_network(_require_file(parser, "--graph", args.graph_doc))
            if args.graph_doc
            else None
        )
        eval_doc = (
            load_json(_require_file(parser, "--eval-report", args.eval_report))
            if args.eval_report
            else None
        )
        if groups_doc is None and clusters_doc is None and net is None and eval_doc is None:
            parser.error("report needs at least one of --groups/--clusters/--graph/--eval-report")
        written = render_all(out_dir, groups_doc, clusters_doc, net, eval_doc)
        print(f"report: {len(written)} files -> {out_dir}")
        return 0

    if stage == "run-all":
        tuples_path = _require_file(parser, "--tuples", config.tuples)
        _require_input(parser, "--embeddings", config.embeddings)
        gt_path = _require_file(parser, "--ground-truth", config.ground_truth)
        if config.out_dir is None:
            parser.error("--out-dir is required")
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)

        index_path = out_dir / "index.json"
        groups_path = out_dir / "groups.json"
        clusters_path = out_dir / "clusters.json"
        graph_json = out_dir / "graph.json"
        graph_dot = out_dir / "graph.dot"
        report_path = out_dir / "report.json"

        index, _ = _stage_ingest(config, tuples_path, index_path)
        grouping = _stage_emg(config, index, groups_path)
        clusters = _stage_iarc(config, index, grouping, clusters_path)
        gt = GroundTruth.load(gt_path)
        net = _stage_graph(config, grouping, clusters, gt, graph_json, "json")
        graph_dot.write_bytes(export_network(net, "dot"))
        report = _stage_eval(config, grouping, clusters, gt, report_path)
        rendered = render_all(
            out_dir,
            load_json(groups_path),
            load_json(clusters_path),
            net,
            report,
        )
        artifacts = [
            index_path,
            groups_path,
            clusters_path,
            graph_json,
            graph_dot,
            report_path,
            *rendered,
        ]
        inputs = [tuples_path, gt_path]
        if config.embeddings and not config.embeddings.startswith(("http://", "https://")):
            inputs.append(Path(config.embeddings))
        _write_manifest(out_dir / "manifest.json", stage, config, inputs, artifacts)
        metrics = report["metrics"]
        print(
            "run-all: recall {recall_pct:.2f}%, edge detection "
            "{edge_detection_rate_pct:.2f}% -> {out}".format(out=out_dir, **metrics)
        )
        return 0

    parser.error(f"unknown stage {stage!r}")
    return 2


if __name__ == "__main__":
    sys.exit(main())
