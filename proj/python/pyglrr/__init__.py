"""Python bindings for the glrr library."""

from ._core import (
    GlrrError,
    basis,
    estimate,
    find_alpha0,
    glrr_residual,
    make_example,
    project,
    series_rank,
    tangent_space_check,
)

__all__ = [
    "GlrrError",
    "basis",
    "estimate",
    "find_alpha0",
    "glrr_residual",
    "make_example",
    "project",
    "series_rank",
    "tangent_space_check",
]
