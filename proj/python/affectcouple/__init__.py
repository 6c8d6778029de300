"""Python bindings for the affectcouple engine."""

from ._core import (
    AffectcoupleError,
    Corpus,
    Session,
    Taxonomy,
    build_groups,
    coupled_clusters,
    emotion_distance,
    estimate,
    generate_synthetic,
    leave_one_out,
    open_session,
)

__all__ = [
    "AffectcoupleError",
    "Corpus",
    "Session",
    "Taxonomy",
    "build_groups",
    "coupled_clusters",
    "emotion_distance",
    "estimate",
    "generate_synthetic",
    "leave_one_out",
    "open_session",
]
