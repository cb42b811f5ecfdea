"""k-valued behaviour trees."""

from ._core import (
    KbtError,
    Model,
    bundled_model,
    bundled_model_text,
    bundled_models,
    chattering,
    count_switches,
    door,
    format_tree,
    parse_model,
    tick,
    wall_follow,
)

__all__ = [
    "KbtError",
    "Model",
    "bundled_model",
    "bundled_model_text",
    "bundled_models",
    "chattering",
    "count_switches",
    "door",
    "format_tree",
    "parse_model",
    "tick",
    "wall_follow",
]
