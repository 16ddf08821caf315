"""Cognitive distance between publication profiles.

Three measures over Web of Science subject categories: distance between 2D
barycenters on a science base map, distance between similarity-adapted
publication vectors, and weighted cosine (dis)similarity; plus the tooling
to rank panel members per research group and compare the measures.
"""

__version__ = "0.1.0"

from .analysis import (
    Method,
    MethodResult,
    assessor_score,
    correlation_report,
    distance_table,
    euclidean_distance,
    pearson,
    rank_members,
    scatter_data,
    spearman,
)
from .barycenter import Point2D, barycenter_2d, generalized_barycenter
from .ingest import (
    parse_assignments_csv,
    parse_pajek,
    parse_profiles_csv,
    serialize_pajek,
    to_model,
)
from .model import (
    AlignmentPolicy,
    BaseMap,
    CategoryCatalog,
    DenseProfileVector,
    EntityKind,
    PublicationProfile,
    SimilarityMatrix,
    aggregate_profiles,
    align_profile,
)
from .sapv import sapv_l1, sapv_legacy, similarity_adapted
from .wcs import psd_check, weighted_cosine, weighted_cosine_dissimilarity
