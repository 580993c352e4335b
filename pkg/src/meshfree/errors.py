"""Exception hierarchy.

``ConfigError`` maps to CLI exit code 2, ``NumericalError`` (and its
subclasses) to exit code 1.  Everything derives from ``MeshfreeError``
so callers can catch library failures in one clause.
"""


class MeshfreeError(Exception):
    """Base class for all library errors."""


class ConfigError(MeshfreeError):
    """Invalid or incomplete run configuration."""


class GeometryError(MeshfreeError):
    """Domain construction failed (empty boundary, inconsistent shape, ...)."""


class StencilError(MeshfreeError):
    """Stencil selection could not satisfy the request."""


class NumericalError(MeshfreeError):
    """A numerical stage failed (no convergence, singular system, ...)."""


class WeightError(NumericalError):
    """Stencil weight computation failed for a specific node."""

    def __init__(self, node: int, message: str):
        self.node = node
        super().__init__(f"node {node}: {message}")


class StorageError(MeshfreeError):
    """Weight-store access for a family or node that was never computed."""


class InstabilityError(NumericalError):
    """Explicit time stepping diverged."""

    def __init__(self, step: int, message: str):
        self.step = step
        super().__init__(f"step {step}: {message}")
