"""Entanglement of momentum-space pattern states in one-dimensional chains."""

from .core import (
    Block,
    CapExceeded,
    CellCoordinates,
    ModeSet,
    OccupancySpec,
    SpecError,
    UnitPattern,
    cell_coords,
    expand,
    repetition_ratios,
)
from .entropy import EntropyResult, NumericalError

__version__ = "0.1.0"
