"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import appearance, context, pipeline
from .evaluate import evaluate, report_csv
from .params import Params, load_params, params_from_mapping
from .raster import read_ppm, write_ppm
from .render import render
from .scene import all_pair_descriptors, parse_scene, serialize_scene
from .spatial import relation_vector

log = logging.getLogger("ctxcat")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _read_scene(path):
    return parse_scene(Path(path).read_text())


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _params(args) -> Params:
    base = load_params(Path(args.params).read_text()) if getattr(args, "params", None) else Params()
    flags = {"top_n": getattr(args, "top_n", None), "max_sweeps": getattr(args, "max_sweeps", None)}
    return params_from_mapping({k: v for k, v in flags.items() if v is not None}, base)


# -- subcommands ---------------------------------------------------------------

def cmd_synth(args) -> None:
    from .synth import GeneratorConfig, generate_scene

    config = GeneratorConfig(seed=args.seed, scene_count=args.count, ambiguity=args.ambiguity,
                             width=args.width, height=args.height)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for index in range(config.scene_count):
        item = generate_scene(config, index)
        stem = out / f"scene_{index:04d}"
        stem.with_suffix(".json").write_text(serialize_scene(item.scene))
        write_ppm(stem.with_suffix(".ppm"), item.raster)
    log.info("wrote %d scenes to %s", config.scene_count, out)


def cmd_features(args) -> None:
    scene = _read_scene(args.scene)
    raster = read_ppm(args.raster)
    regions = [replace(r, features=None) for r in scene.regions]
    bare = scene.with_regions(regions)
    filled = [replace(r, features=appearance.extract_features(bare, r.id, raster)) for r in regions]
    _emit(serialize_scene(scene.with_regions(filled)), args.out)


def cmd_train_appearance(args) -> None:
    scenes = [_read_scene(p) for p in args.scenes]
    vocab = scenes[0].vocabulary
    examples = []
    for path, scene in zip(args.scenes, scenes):
        if scene.vocabulary != vocab:
            raise ValueError(f"{path}: vocabulary differs from {args.scenes[0]}")
        for reg in scene.regions:
            if reg.truth is None or reg.features is None:
                raise ValueError(f"{path}: region {reg.id} needs both truth and features")
            examples.append((reg.features, reg.truth))
    model = appearance.train_classifier(examples, vocab, args.sigma, args.cost)
    _emit(appearance.save_model(model), args.out)


def cmd_train_context(args) -> None:
    scenes = [_read_scene(p) for p in args.scenes]
    model = context.train_context(scenes, _params(args).fuzzy)
    _emit(context.save_context(model), args.out)


def cmd_relate(args) -> None:
    scene = _read_scene(args.scene)
    fuzzy = _params(args).fuzzy
    lines = ["i,j,theta,d,rho,mu_above,mu_below,mu_beside,mu_near,mu_sur,dominant"]
    for (i, j), desc in all_pair_descriptors(scene).items():
        r = relation_vector(desc, fuzzy)
        nums = (desc.theta, desc.d, desc.rho, *r.as_tuple())
        lines.append(f"{i},{j}," + ",".join(repr(float(x)) for x in nums) + f",{r.dominant_direction}")
    _emit("\n".join(lines) + "\n", args.out)


def cmd_infer(args) -> None:
    scene = _read_scene(args.scene)
    params = _params(args)
    model = None
    if args.appearance_model:
        model = appearance.load_model(Path(args.appearance_model).read_text())
    ctx = context.load_context(Path(args.context_model).read_text())
    preds = pipeline.infer(scene, model, ctx, params, args.method)
    _emit(pipeline.serialize_predictions(preds), args.out)


def cmd_eval(args) -> None:
    if len(args.truth) != len(args.pred):
        raise UsageError("eval needs one predictions file per truth scene")
    truth, preds = {}, {}
    vocab = None
    for n, (tpath, ppath) in enumerate(zip(args.truth, args.pred)):
        scene = _read_scene(tpath)
        vocab = vocab or scene.vocabulary
        if scene.vocabulary != vocab:
            raise ValueError(f"{tpath}: vocabulary differs from {args.truth[0]}")
        lookup = {name: i for i, name in enumerate(vocab)}
        for reg in scene.regions:
            if reg.truth is None:
                raise ValueError(f"{tpath}: region {reg.id} has no ground truth")
            truth[n, reg.id] = reg.truth
        for rid, p in pipeline.parse_predictions(Path(ppath).read_text()).items():
            if p.concept not in lookup:
                raise ValueError(f"{ppath}: unknown concept {p.concept!r}")
            preds[n, rid] = lookup[p.concept]
    _emit(report_csv(evaluate(preds, truth, vocab)), args.out)


def cmd_experiment(args) -> None:
    from .experiment import comparison_csv, load_experiment_config, run_experiment
    from .plotting import accuracy_vs_top_n, per_concept_bars

    config = load_experiment_config(Path(args.config).read_text())
    result = run_experiment(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "comparison.csv").write_text(comparison_csv(result))
    accuracy_vs_top_n(result, out / "accuracy_vs_topn.png")
    per_concept_bars(result, out / "per_concept.png", config.params.top_n)
    log.info("wrote comparison.csv and figures to %s", out)


def cmd_render(args) -> None:
    scene = _read_scene(args.scene)
    if args.pred:
        lookup = {name: i for i, name in enumerate(scene.vocabulary)}
        preds = pipeline.parse_predictions(Path(args.pred).read_text())
        unknown = sorted({p.concept for p in preds.values()} - set(lookup))
        if unknown:
            raise ValueError(f"unknown concept(s) in predictions: {', '.join(unknown)}")
        labeling = {rid: lookup[p.concept] for rid, p in preds.items()}
    else:
        labeling = {r.id: r.truth for r in scene.regions if r.truth is not None}
    Path(args.out).write_bytes(render(scene, labeling))


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ctxcat", description="Contextual object categorisation over labelled regions.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic scene corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--ambiguity", type=float, default=0.0)
    p.add_argument("--width", type=int, default=64)
    p.add_argument("--height", type=int, default=48)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("features", help="compute region features from a PPM raster")
    p.add_argument("scene")
    p.add_argument("--raster", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train-appearance", help="fit the one-vs-rest appearance classifier")
    p.add_argument("scenes", nargs="+")
    p.add_argument("--sigma", type=float, default=appearance.DEFAULT_SIGMA)
    p.add_argument("--cost", type=float, default=appearance.DEFAULT_COST)
    p.add_argument("--out")
    p.set_defaults(func=cmd_train_appearance)

    p = sub.add_parser("train-context", help="estimate priors, co-occurrence and mean relations")
    p.add_argument("scenes", nargs="+")
    p.add_argument("--params")
    p.add_argument("--out")
    p.set_defaults(func=cmd_train_context)

    p = sub.add_parser("relate", help="dump pairwise descriptors and fuzzy relations as CSV")
    p.add_argument("scene")
    p.add_argument("--params")
    p.add_argument("--out")
    p.set_defaults(func=cmd_relate)

    p = sub.add_parser("infer", help="label the regions of a scene")
    p.add_argument("scene")
    p.add_argument("--appearance-model")
    p.add_argument("--context-model", required=True)
    p.add_argument("--params")
    p.add_argument("--top-n", type=int)
    p.add_argument("--max-sweeps", type=int)
    p.add_argument("--method", choices=pipeline.METHODS, default="icm")
    p.add_argument("--out")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("eval", help="score predictions against ground truth")
    p.add_argument("truth", nargs="+")
    p.add_argument("--pred", nargs="+", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="appearance-only vs contextual comparison on a synthetic corpus")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("render", help="paint a labelled scene to PPM")
    p.add_argument("scene")
    p.add_argument("--pred", help="predictions file; ground truth is used when omitted")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_usage().strip())
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"ctxcat {args.command}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, OSError) as exc:
        print(f"ctxcat {args.command}: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
