# cli/main.py
"""
quakeseg command line: the end-to-end `run` plus one subcommand per stage.

Exit codes: 0 ok, 2 configuration/argument error, 3 data error,
4 numerical divergence, 1 anything unexpected.
"""
import argparse
import logging
import sys
from typing import List, Optional, Tuple

from data_synthesizer import load_scene_spec, write_scene
from evaluation.grid_search import GridSpec, grid_search
from feature_extraction.feature_matrix import build_feature_matrix, majority_classes
from file_processor.label_map_processor import load_label_map, render_boundaries, save_label_map, save_ppm
from file_processor.raster_processor import compute_ndvi, load_raster
from file_processor.table_processor import (
    load_feature_table,
    load_region_classes,
    predictions_frame,
    save_feature_table,
    save_predictions,
    save_region_table,
    save_report,
)
from model_training.classifiers import load_classifier, make_classifier, save_classifier
from orchestration.graph import run_pipeline
from region_merging.rag import merge_regions
from region_merging.region_stats import compute_region_stats
from segmentation.fast_scan import adaptive_merge_small, fast_scan_partition
from utils.config import (
    MODEL_FAMILIES,
    WIDTH_GRID,
    FeatureConfig,
    HeterogeneityWeights,
    MergeConfig,
    SegmentationConfig,
    TrainConfig,
    load_pipeline_config,
    read_toml,
)
from utils.errors import ArgumentError, ConfigError, QuakeSegError, exit_code_for
from utils.logging_utils import configure_logging

logger = logging.getLogger("quakeseg")


def _validated(model, **values):
    try:
        return model(**{k: v for k, v in values.items() if v is not None})
    except ValueError as e:
        raise ConfigError(str(e)) from e


def cmd_synth(args) -> None:
    spec = load_scene_spec(args.spec)
    if args.seed is not None:
        spec = spec.model_copy(update={"seed": args.seed})
    write_scene(spec, args.out_raster, args.out_truth, args.out_classes)
    print(f"wrote {len(spec.regions)}-region scene to {args.out_raster}")


def cmd_segment(args) -> None:
    cfg = _validated(SegmentationConfig, init_threshold=args.threshold, min_size=args.min_size)
    raster = load_raster(args.raster)
    labels = adaptive_merge_small(fast_scan_partition(raster, cfg.init_threshold), raster, cfg.min_size)
    save_label_map(labels, args.out)
    if args.overlay:
        save_ppm(render_boundaries(raster, labels), args.overlay)
    print(f"{labels.n_regions} regions -> {args.out}")


def cmd_merge(args) -> None:
    weights = None
    if args.config:
        weights = load_pipeline_config(args.config).merging.weights
    weights = weights or HeterogeneityWeights()
    overrides = {"w_spec": args.wspec, "w_texture": args.wtex, "w_shape": args.wshape}
    values = weights.model_dump()
    values.update({k: v for k, v in overrides.items() if v is not None})
    weights = _validated(HeterogeneityWeights, **values)
    cfg = _validated(MergeConfig, scale=args.scale, weights=weights)
    raster = load_raster(args.raster)
    labels = load_label_map(args.labels).validate()
    texture_band = raster.band(args.nir_index) if args.nir_index is not None else None
    merged = merge_regions(labels, raster, cfg.weights, cfg.scale, texture_band)
    save_label_map(merged, args.out)
    if args.overlay:
        save_ppm(render_boundaries(raster, merged), args.overlay)
    print(f"{labels.n_regions} -> {merged.n_regions} regions -> {args.out}")


def cmd_features(args) -> None:
    cfg = _validated(FeatureConfig, nir_index=args.nir_index, red_index=args.red_index, glcm_levels=args.glcm_levels)
    raster = load_raster(args.raster)
    labels = load_label_map(args.labels).validate()
    truth = None
    if args.classes:
        truth = load_region_classes(args.classes)
    elif args.truth_labels:
        if not args.truth_classes:
            raise ArgumentError("--truth-labels requires --truth-classes")
        truth = majority_classes(labels, load_label_map(args.truth_labels), load_region_classes(args.truth_classes))
    ndvi = compute_ndvi(raster, cfg.nir_index, cfg.red_index)
    matrix = build_feature_matrix(raster, labels, ndvi, truth, cfg.nir_index, cfg.glcm_levels)
    save_feature_table(matrix, args.out)
    if args.regions:
        save_region_table(compute_region_stats(raster, labels, raster.band(cfg.nir_index)), args.regions)
    print(f"{matrix.n_rows} x {len(matrix.columns)} features -> {args.out}")


def load_grid_file(path, family: str) -> Tuple[GridSpec, TrainConfig]:
    """Grid and training settings from a `[grid]` file or from a full pipeline config."""
    raw = read_toml(path)
    if "evaluation" in raw:
        config = load_pipeline_config(path)
        grid = config.evaluation.grid.get(family, {"hidden_width": list(WIDTH_GRID)})
        return GridSpec(grid), config.training
    training = _validated(TrainConfig, **raw.get("training", {}))
    grid = raw.get("grid", {"hidden_width": list(WIDTH_GRID)})
    try:
        return GridSpec(grid), training
    except ArgumentError as e:
        raise ConfigError(f"{path}: {e}") from e


def cmd_eval(args) -> None:
    if args.grid:
        grid, training = load_grid_file(args.grid, args.model)
    else:
        grid, training = GridSpec({"hidden_width": list(WIDTH_GRID)}), TrainConfig()
    features = load_feature_table(args.features)
    result = grid_search(
        make_classifier(args.model, training), grid, features, args.k, args.seed, args.positive_class, args.n_jobs
    )
    if args.report:
        save_report(result.table, args.report)
    print(result.table.to_string(index=False))
    print(f"best {result.best_params}: mean accuracy {result.best_score:.4f}")


def cmd_train(args) -> None:
    training = TrainConfig()
    if args.config:
        training = load_pipeline_config(args.config).training
    if args.seed is not None:
        training = training.model_copy(update={"seed": args.seed})
    features = load_feature_table(args.features)
    pipeline = make_classifier(args.model, training, hidden_width=args.hidden_width)
    pipeline.fit(features.values, features.require_classes())
    save_classifier(pipeline, args.model_file)
    print(f"trained {args.model} on {features.n_rows} regions -> {args.model_file}")


def cmd_predict(args) -> None:
    features = load_feature_table(args.features)
    pipeline = load_classifier(args.model_file)
    frame = predictions_frame(features.region_ids, pipeline.predict_proba(features.values), pipeline.classes_)
    save_predictions(frame, args.output)
    print(f"predicted {len(frame)} regions -> {args.output}")


def cmd_run(args) -> None:
    config = load_pipeline_config(args.config, seed=args.seed)
    result = run_pipeline(config)
    for name, path in result["published"].items():
        print(f"  {name}: {path}")
    comparison = result.get("comparison")
    if comparison is not None:
        print(comparison.to_string(index=False))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quakeseg", description="Superpixel building damage detection")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic scene")
    p.add_argument("--spec", required=True, help="scene spec TOML")
    p.add_argument("--out-raster", required=True)
    p.add_argument("--out-truth", required=True)
    p.add_argument("--out-classes", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("segment", help="fast-scan over-segmentation with small-region merging")
    p.add_argument("--raster", "--input", dest="raster", required=True)
    p.add_argument("--out", "--output", dest="out", required=True, help="label map PGM")
    p.add_argument("--threshold", type=float)
    p.add_argument("--min-size", type=int)
    p.add_argument("--overlay", help="boundary overlay PPM")
    p.set_defaults(func=cmd_segment)

    p = sub.add_parser("merge", help="RAG region merging")
    p.add_argument("--raster", "--input", dest="raster", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", "--output", dest="out", required=True)
    p.add_argument("--scale", type=float)
    p.add_argument("--wspec", type=float)
    p.add_argument("--wtex", type=float)
    p.add_argument("--wshape", type=float)
    p.add_argument("--config", help="pipeline config supplying heterogeneity weights")
    p.add_argument("--nir-index", type=int, help="band used for LBP texture (default: last)")
    p.add_argument("--overlay", help="boundary overlay PPM")
    p.set_defaults(func=cmd_merge)

    p = sub.add_parser("features", help="per-region feature table")
    p.add_argument("--raster", "--input", dest="raster", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--out", "--output", dest="out", required=True)
    p.add_argument("--classes", "--truth", dest="classes", help="class per region of --labels (CSV)")
    p.add_argument("--truth-labels", help="ground-truth label map; classes by pixel majority")
    p.add_argument("--truth-classes", help="class per ground-truth region (CSV)")
    p.add_argument("--regions", help="also write the RegionStats summary CSV")
    p.add_argument("--nir-index", type=int)
    p.add_argument("--red-index", type=int)
    p.add_argument("--glcm-levels", type=int)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="fit one classifier on all labelled regions")
    p.add_argument("--features", required=True)
    p.add_argument("--model", choices=MODEL_FAMILIES, required=True)
    p.add_argument("--hidden-width", type=int, default=50)
    p.add_argument("--model-file", required=True)
    p.add_argument("--config", help="pipeline config supplying training settings")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="classify regions with a saved model")
    p.add_argument("--features", required=True)
    p.add_argument("--model-file", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="grid search with stratified cross-validation")
    p.add_argument("--features", required=True)
    p.add_argument("--model", choices=MODEL_FAMILIES, required=True)
    p.add_argument("--grid", help="TOML with a [grid] table or a pipeline config")
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--positive-class", type=int, default=1)
    p.add_argument("--n-jobs", type=int, default=1)
    p.add_argument("--report", help="score table CSV")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, help="overrides the config seed")
    p.set_defaults(func=cmd_run)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging("DEBUG" if args.verbose else None)
    try:
        args.func(args)
    except QuakeSegError as e:
        logger.error("%s", e)
        return exit_code_for(e)
    except Exception:
        logger.exception("unexpected failure")
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
