"""Regional income clustering: ingestion, clustering, validation, inequality and reporting."""

__version__ = "0.1.0"

from .data import (
    Archetype,
    Dataset,
    FeatureMatrix,
    RegionRecord,
    SyntheticSpec,
    generate_synthetic,
    parse_dataset,
    serialize_dataset,
    table1_spec,
    to_feature_matrix,
)
from .distance import DistanceMatrix, distance_matrix, euclidean
from .hierarchical import Dendrogram, agglomerate, cophenetic_correlation, cophenetic_matrix, cut
from .inequality import GroupedShares, IncomeSample, funds_ratio, gini_grouped, gini_microdata, poverty_headcount
from .kmeans import KMeansResult, WcssCurve, elbow_select, explained_variance, kmeans, wcss_curve
from .partition import Partition, adjusted_rand_index
from .preprocess import ColumnStats, column_stats, zscore
from .report import ClusterProfile, RatioReport, profile, ratio_report, render_markdown
from .svg import render_dendrogram_svg, render_scatter_svg
