"""Command line entry point: ``pagenet {ingest,classify,stats,graphs,backbone,all}``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .pipeline import EXIT_CODES, STAGES, PipelineConfig, StageError, load_config, run_pipeline, with_overrides

VERBS = STAGES + ("all",)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pagenet",
        description="Activity statistics, co-occurrence networks and backbones for geolocated pages.",
    )
    parser.add_argument("verb", choices=VERBS, help="stage to run; 'all' runs every stage")
    parser.add_argument("--config", type=Path, help="INI config with [inputs], [classify], [backbone], [output]")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--alpha", type=float, action="append", help="significance level (repeatable)")
    parser.add_argument("--pages", type=Path, help="pages CSV (page_id,name,lat,lon)")
    parser.add_argument("--posts", type=Path, help="posts JSON lines")
    parser.add_argument("--likes", type=Path, help="likes JSON lines")
    parser.add_argument("--comments", type=Path, help="comments JSON lines")
    parser.add_argument("--habitual-min-likes", type=int)
    parser.add_argument("--polarization-fraction", type=float)
    parser.add_argument("--no-figures", action="store_true", help="skip PNG figures")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    overrides = dict(
        pages=args.pages,
        posts=args.posts,
        likes=args.likes,
        comments=args.comments,
        habitual_min_likes=args.habitual_min_likes,
        polarization_fraction=args.polarization_fraction,
        alphas=tuple(args.alpha) if args.alpha else None,
        out=args.out,
        figures=False if args.no_figures else None,
    )
    try:
        if args.config is not None:
            config = load_config(args.config, **overrides)
        else:
            config = with_overrides(PipelineConfig(), **overrides)
    except (OSError, ValueError, TypeError) as exc:
        print(f"pagenet: config error: {exc}", file=sys.stderr)
        return EXIT_CODES["config"]

    stages = STAGES if args.verb == "all" else (args.verb,)
    try:
        manifest = run_pipeline(config, stages)
    except StageError as exc:
        print(f"pagenet: {exc}", file=sys.stderr)
        return exc.exit_code
    n = sum(len(v) for group in ("exports", "other") for v in manifest[group].values())
    print(f"wrote {n} files to {config.out} (stages: {', '.join(manifest['stages'])})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
