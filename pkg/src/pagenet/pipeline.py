"""Staged pipeline: ingest -> classify -> stats -> graphs -> backbone.

Each stage writes into a private staging directory; files are moved into the
output directory only when every requested stage has succeeded.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
import shutil
import tempfile
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from . import backbone as bb
from . import classify as cl
from . import graph as gr
from . import ingest
from . import stats as st

logger = logging.getLogger(__name__)

STAGES = ("ingest", "classify", "stats", "graphs", "backbone")
# in-memory prerequisites; backbone alone reads persisted edge lists instead
STAGE_DEPS = {
    "ingest": (),
    "classify": ("ingest",),
    "stats": ("ingest", "classify"),
    "graphs": ("ingest", "classify"),
    "backbone": (),
}
EXIT_CODES = {"config": 2, "ingest": 3, "classify": 4, "stats": 5, "graphs": 6, "backbone": 7}

NETWORKS = ("pages_reshares", "pages_common_users")
CORRELATION_TABLE1 = ("users", "posts", "likes", "comments", "shares")
CORRELATION_TABLE2 = ("polarized",) + CORRELATION_TABLE1
AUDIENCE = ("occasional", "polarized_here", "habitual_not_polarized", "polarized_elsewhere")
EXPORT_KINDS = (
    "metrics",
    "correlation_table1",
    "correlation_table2",
    "ccdf",
    "post_types",
    "admin_split",
    "edge_lists",
    "backbone",
    "geolayers",
)


class StageError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException | str):
        self.stage = stage
        self.cause = cause
        self.exit_code = EXIT_CODES.get(stage, 1)
        super().__init__(f"{stage} stage failed: {cause}")


@dataclass(frozen=True)
class PipelineConfig:
    pages: Path | None = None
    posts: Path | None = None
    likes: Path | None = None
    comments: Path | None = None
    habitual_min_likes: int = 5
    polarization_fraction: float = 0.95
    alphas: tuple[float, ...] = (0.01, 0.05)
    out: Path = Path("out")
    figures: bool = True

    def __post_init__(self):
        if not self.alphas:
            raise ValueError("at least one alpha is required")
        for a in self.alphas:
            if not 0.0 < a <= 1.0:
                raise ValueError(f"alpha must lie in (0, 1], got {a}")
        # normalizes types and checks the thresholds
        self.classify_config

    @property
    def classify_config(self) -> cl.ClassifyConfig:
        return cl.ClassifyConfig(self.habitual_min_likes, self.polarization_fraction)

    def inputs(self) -> dict[str, Path | None]:
        return {"pages": self.pages, "posts": self.posts, "likes": self.likes, "comments": self.comments}

    def to_dict(self) -> dict:
        return {
            **{k: None if v is None else str(v) for k, v in self.inputs().items()},
            "habitual_min_likes": self.habitual_min_likes,
            "polarization_fraction": self.polarization_fraction,
            "alphas": list(self.alphas),
        }


def parse_alphas(text: str) -> tuple[float, ...]:
    return tuple(float(a) for a in text.replace(",", " ").split())


def load_config(path: Path, **overrides) -> PipelineConfig:
    """Read an INI-style config; relative input paths resolve against its directory.

    Keyword overrides (``None`` means "not given") take precedence.
    """
    path = Path(path)
    parser = configparser.ConfigParser()
    with open(path, encoding="utf-8") as fh:
        parser.read_file(fh)
    base = path.parent
    values: dict = {}
    if parser.has_section("inputs"):
        for key in ("pages", "posts", "likes", "comments"):
            if parser.has_option("inputs", key):
                values[key] = base / parser.get("inputs", key)
    if parser.has_section("classify"):
        if parser.has_option("classify", "habitual_min_likes"):
            values["habitual_min_likes"] = parser.getint("classify", "habitual_min_likes")
        if parser.has_option("classify", "polarization_fraction"):
            values["polarization_fraction"] = parser.getfloat("classify", "polarization_fraction")
    if parser.has_option("backbone", "alpha"):
        values["alphas"] = parse_alphas(parser.get("backbone", "alpha"))
    if parser.has_option("output", "out"):
        values["out"] = base / parser.get("output", "out")
    if parser.has_option("output", "figures"):
        values["figures"] = parser.getboolean("output", "figures")
    values.update({k: v for k, v in overrides.items() if v is not None})
    return PipelineConfig(**values)


# GeoJSON


def export_geolayer(
    metrics: Sequence[st.PageMetrics], measure: str, pages: Iterable[ingest.PageRecord], stream: TextIO | None = None
) -> dict:
    """Point feature collection, one feature per page carrying ``measure``."""
    if measure not in st.METRIC_COLUMNS:
        raise ValueError(f"unknown measure {measure!r}; expected one of {st.METRIC_COLUMNS}")
    by_id = {p.page_id: p for p in pages}
    features = []
    for row in metrics:
        page = by_id.get(row.page_id)
        if page is None:
            raise KeyError(f"metrics row for unknown page {row.page_id!r}")
        value = getattr(row, measure)
        if value < 0:
            raise ValueError(f"negative {measure} for page {row.page_id}")
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [page.longitude, page.latitude]},
                "properties": {"page_id": page.page_id, "name": page.name, "metric": measure, "value": value},
            }
        )
    layer = {"type": "FeatureCollection", "features": features}
    if stream is not None:
        json.dump(layer, stream, indent=1, sort_keys=True)
        stream.write("\n")
    return layer


# Run


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _alpha_tag(alpha: float) -> str:
    return f"alpha{alpha:g}"


@dataclass
class _Run:
    config: PipelineConfig
    staging: Path
    outputs: dict[str, list[str]] = field(default_factory=dict)
    dataset: ingest.ActivityDataset | None = None
    classification: cl.UserClassification | None = None
    graphs: dict[str, gr.WeightedGraph] = field(default_factory=dict)

    def open(self, rel: str, kind: str):
        path = self.staging / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        self.outputs.setdefault(kind, []).append(rel)
        return open(path, "w", encoding="utf-8", newline="")

    def write_json(self, rel: str, kind: str, obj) -> None:
        with self.open(rel, kind) as fh:
            json.dump(obj, fh, indent=2, sort_keys=True)
            fh.write("\n")

    def figure(self, rel: str) -> Path:
        self.outputs.setdefault("figures", []).append(rel)
        return self.staging / rel


def _stage_ingest(run: _Run) -> ingest.ValidationReport:
    paths = run.config.inputs()
    missing = [k for k, v in paths.items() if v is None]
    if missing:
        raise ValueError(f"no path configured for input(s): {', '.join(missing)}")
    for name, p in paths.items():
        if not Path(p).is_file():
            raise FileNotFoundError(f"{name} file not found: {p}")
    dataset = ingest.load_dataset(paths["pages"], paths["posts"], paths["likes"], paths["comments"])
    report = ingest.validate(dataset)
    if not report.ok:
        raise ingest.IntegrityError("dataset failed validation", report.errors)
    run.dataset = dataset
    return report


def _stage_classify(run: _Run) -> None:
    run.classification = cl.classify_users(run.dataset, run.config.classify_config)


def _write_classify(run: _Run) -> None:
    with run.open("classify/users.csv", "classification") as fh:
        cl.write_classification(run.classification, fh)
    summary = cl.category_counts(run.classification, run.dataset).to_dict()
    summary["polarized_fraction_commented"] = cl.polarized_activity_distributions(
        run.classification, run.dataset
    ).fraction_commented
    run.write_json("classify/summary.json", "classification", summary)


def _stage_stats(run: _Run) -> None:
    ds, c = run.dataset, run.classification
    metrics = st.page_metrics(ds, c)
    with run.open("stats/metrics.csv", "metrics") as fh:
        st.write_metrics(metrics, fh)
    for kind, cols in (("correlation_table1", CORRELATION_TABLE1), ("correlation_table2", CORRELATION_TABLE2)):
        with run.open(f"stats/{kind}.csv", kind) as fh:
            st.write_correlation_matrix(st.correlation_matrix(metrics, cols), fh)

    breakdown = st.post_type_breakdown(ds)
    with run.open("stats/post_types.csv", "post_types") as fh:
        st.write_post_types(breakdown, fh)
    split = st.admin_split(ds)
    with run.open("stats/admin_split.csv", "admin_split") as fh:
        st.write_admin_split(split, fh)

    audiences = [cl.page_audience(p, c, ds) for p in ds.page_ids]
    polar = cl.polarized_activity_distributions(c, ds)
    samples = {
        **{f"page_{m}": st.column(metrics, m) for m in CORRELATION_TABLE1},
        "page_polarized": st.column(metrics, "polarized"),
        "post_likes": st.likes_per_post(ds),
        "post_comments": st.comments_per_post(ds),
        "post_likes_admin": list(split.admin_post_likes),
        "post_likes_non_admin": list(split.non_admin_post_likes),
        **{f"audience_{k}": [getattr(a, k) for a in audiences] for k in AUDIENCE},
        "polarized_user_likes": list(polar.likes),
        "polarized_user_comments": list(polar.comments),
    }
    for name, values in samples.items():
        with run.open(f"stats/ccdf/{name}.csv", "ccdf") as fh:
            st.write_ccdf(values, fh)

    for measure in st.METRIC_COLUMNS:
        with run.open(f"geo/{measure}.geojson", "geolayers") as fh:
            export_geolayer(metrics, measure, ds.pages, fh)

    validation = ingest.validate(ds)
    counts = cl.category_counts(c, ds)
    run.write_json(
        "stats/summary.json",
        "summaries",
        {
            "posts": validation.counts["posts"],
            "object_id_coverage": validation.object_id_coverage,
            "admin_share": split.admin_share,
            "admin_like_share": split.admin_like_share,
            "admin_page_correlation": split.page_correlation(),
            "post_type_fractions": {
                m: {t: breakdown.fraction(m, t) for t in ingest.POST_TYPES} for m in breakdown.totals
            },
            "categories": counts.to_dict(),
            "polarized_fraction_commented": polar.fraction_commented,
        },
    )

    if run.config.figures:
        from . import plots

        plots.post_type_figure(
            {m: {t: breakdown.fraction(m, t) for t in ingest.POST_TYPES} for m in breakdown.totals},
            run.figure("figures/post_types.png"),
        )
        plots.ccdf_figure(
            {m: samples[f"page_{m}"] for m in CORRELATION_TABLE1},
            run.figure("figures/page_activity_ccdf.png"),
            xlabel="count per page",
        )
        plots.ccdf_figure(
            {"likes": samples["post_likes"], "comments": samples["post_comments"]},
            run.figure("figures/post_activity_ccdf.png"),
            xlabel="count per post",
        )
        plots.ccdf_figure(
            {"all": samples["post_likes"], "admin": samples["post_likes_admin"], "not admin": samples["post_likes_non_admin"]},
            run.figure("figures/admin_likes_ccdf.png"),
            xlabel="likes per post",
            colors={"all": "#d7191c", "admin": "#2c7bb6", "not admin": "#1a9641"},
        )
        plots.admin_posts_figure(split.per_page, run.figure("figures/admin_posts.png"))
        plots.ccdf_figure(
            {k: samples[f"audience_{k}"] for k in AUDIENCE},
            run.figure("figures/audience_ccdf.png"),
            xlabel="active users per page",
            colors={},
        )
        plots.ccdf_figure(
            {"likes": samples["polarized_user_likes"], "comments": samples["polarized_user_comments"]},
            run.figure("figures/polarized_activity_ccdf.png"),
            xlabel="count per polarized user",
        )


def _stage_graphs(run: _Run) -> None:
    ds, c = run.dataset, run.classification
    run.graphs = {
        "pages_reshares": gr.project(gr.build_pages_posts(ds)),
        "pages_common_users": gr.project(gr.build_pages_polarized(ds, c)),
    }
    for name, g in run.graphs.items():
        with run.open(f"graphs/{name}.csv", "edge_lists") as fh:
            gr.write_edge_list(g, fh)


def _load_persisted_graphs(run: _Run) -> dict[str, gr.WeightedGraph]:
    graphs = {}
    for name in NETWORKS:
        path = run.config.out / "graphs" / f"{name}.csv"
        if not path.is_file():
            raise FileNotFoundError(f"missing persisted edge list {path}; run the graphs stage first")
        with open(path, encoding="utf-8", newline="") as fh:
            graphs[name] = gr.read_edge_list(fh)
    return graphs


def _page_registry(run: _Run) -> dict[str, ingest.PageRecord]:
    if run.dataset is not None:
        return run.dataset.page_by_id
    if run.config.pages is not None and Path(run.config.pages).is_file():
        with open(run.config.pages, encoding="utf-8", newline="") as fh:
            return {p.page_id: p for p in ingest.load_pages(fh)}
    return {}


def _stage_backbone(run: _Run) -> None:
    graphs = run.graphs or _load_persisted_graphs(run)
    registry = _page_registry(run)
    summary = {"conventions": bb.CONVENTIONS, "networks": {}}
    curves = {}
    for name in NETWORKS:
        g = graphs[name]
        per_alpha = []
        if len(g) == 0:
            logger.warning("%s network has no edges; backbone skipped", name)
            summary["networks"][name] = per_alpha
            continue
        scores = bb.score_edges(g)
        for alpha in run.config.alphas:
            result = bb.disparity_filter(g, bb.BackboneConfig(alpha), scores)
            tag = _alpha_tag(alpha)
            with run.open(f"backbone/{name}_{tag}.csv", "backbone") as fh:
                bb.write_backbone(result, fh)
            with run.open(f"backbone/{name}_{tag}_ranking.csv", "backbone") as fh:
                bb.write_ranking(bb.backbone_report(result, registry), fh)
            per_alpha.append(result.summary())
        summary["networks"][name] = per_alpha
        curves[name] = {
            a: bb.disparity_filter(g, a, scores).weight_fraction_preserved
            for a in sorted({*run.config.alphas, 0.001, 0.01, 0.05, 0.1, 0.2, 0.5, 1.0})
        }
    run.write_json("backbone/summary.json", "backbone", summary)
    if run.config.figures and curves:
        from . import plots

        plots.weight_fraction_figure(curves, run.figure("figures/backbone_weight_fraction.png"))


def run_pipeline(config: PipelineConfig, stages: Sequence[str] = STAGES) -> dict:
    """Run the requested stages and return the run manifest.

    Upstream stages needed in memory are recomputed but only the requested
    stages' files are written. The backbone stage alone reads the persisted
    edge lists from the output directory.
    """
    unknown = [s for s in stages if s not in STAGES]
    if unknown:
        raise ValueError(f"unknown stage(s): {', '.join(unknown)}")
    wanted = set(stages)
    needed = wanted | {d for s in wanted for d in STAGE_DEPS[s]}
    todo = [s for s in STAGES if s in needed]

    out = Path(config.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".pagenet-staging-", dir=out.parent))
    run = _Run(config, staging)
    timings: dict[str, float] = {}
    try:
        for stage in todo:
            t0 = time.perf_counter()
            try:
                if stage == "ingest":
                    report = _stage_ingest(run)
                    if "ingest" in wanted:
                        run.write_json("ingest/validation.json", "validation", report.to_dict())
                elif stage == "classify":
                    _stage_classify(run)
                    if "classify" in wanted:
                        _write_classify(run)
                elif stage == "stats":
                    _stage_stats(run)
                elif stage == "graphs":
                    _stage_graphs(run)
                elif stage == "backbone":
                    _stage_backbone(run)
            except StageError:
                raise
            except Exception as exc:
                raise StageError(stage, exc) from exc
            timings[stage] = round(time.perf_counter() - t0, 6)

        out.mkdir(parents=True, exist_ok=True)
        files = {}
        for kind, rels in run.outputs.items():
            files[kind] = []
            for rel in rels:
                files[kind].append({"path": rel, "sha256": sha256(staging / rel)})
        for rels in run.outputs.values():
            for rel in rels:
                dest = out / rel
                dest.parent.mkdir(parents=True, exist_ok=True)
                os.replace(staging / rel, dest)
    finally:
        shutil.rmtree(staging, ignore_errors=True)

    manifest = {
        "stages": list(todo),
        "written": [s for s in todo if s in wanted],
        "config": config.to_dict(),
        "exports": {k: files[k] for k in EXPORT_KINDS if k in files},
        "other": {k: v for k, v in sorted(files.items()) if k not in EXPORT_KINDS},
        "timings": timings,
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return manifest


def with_overrides(config: PipelineConfig, **kw) -> PipelineConfig:
    return replace(config, **{k: v for k, v in kw.items() if v is not None})
