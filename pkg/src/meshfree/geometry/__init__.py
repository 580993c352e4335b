from .spacing import ConstantSpacing, LinearSpacing, as_spacing
from .shapes import Ball, Box, Shape, ShapeDifference, ShapeUnion
from .nodeset import NodeSet
from .boundary import add_ghost_nodes, discretize_boundary, grid_nodes
from .fill import fill_interior
from .stencils import find_closest_stencils

__all__ = [
    "Ball",
    "Box",
    "ConstantSpacing",
    "LinearSpacing",
    "NodeSet",
    "Shape",
    "ShapeDifference",
    "ShapeUnion",
    "add_ghost_nodes",
    "as_spacing",
    "discretize_boundary",
    "fill_interior",
    "find_closest_stencils",
    "grid_nodes",
]
