"""Activity statistics, co-occurrence networks and disparity-filter backbones
for geolocated pages and their users."""

from .backbone import BackboneConfig, BackboneResult, backbone_report, disparity_filter, edge_significance
from .classify import ClassifyConfig, UserClassification, category_counts, classify_users, page_audience
from .graph import BipartiteGraph, WeightedGraph, build_pages_polarized, build_pages_posts, project, reshare_classes
from .ingest import ActivityDataset, load_dataset, load_events, load_pages, validate
from .pipeline import PipelineConfig, export_geolayer, run_pipeline
from .stats import correlation_matrix, empirical_ccdf, page_metrics, pearson

__all__ = [
    "ActivityDataset", "BackboneConfig", "BackboneResult", "BipartiteGraph", "ClassifyConfig", "PipelineConfig",
    "UserClassification", "WeightedGraph", "backbone_report", "build_pages_polarized", "build_pages_posts",
    "category_counts", "classify_users", "correlation_matrix", "disparity_filter", "edge_significance",
    "empirical_ccdf", "export_geolayer", "load_dataset", "load_events", "load_pages", "page_audience",
    "page_metrics", "pearson", "project", "reshare_classes", "run_pipeline", "validate",
]
__version__ = "0.1.0"
