"""Exceptions raised by the coverage toolkit.

Every error the toolkit raises derives from ``ToolkitError`` so the management
commands can map them onto exit codes in one place.
"""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(ToolkitError, ValueError):
    """A value lies outside its documented range."""


class OutOfBoundsError(ToolkitError, IndexError):
    """A point falls outside the grid extent."""

    def __init__(self, col, row, grid):
        self.col = col
        self.row = row
        self.grid = grid
        super().__init__(
            f"bin ({col}, {row}) is outside the {grid.n_cols}x{grid.n_rows} grid"
        )


class SizeError(ToolkitError, ValueError):
    """Too few samples for the requested operation."""


class ConditioningError(ToolkitError, ArithmeticError):
    """A linear system could not be solved reliably."""


class ShapeError(ToolkitError, ValueError):
    """Two rasters do not share a grid."""


class FormatError(ToolkitError, ValueError):
    """An input file does not follow its format contract."""

    def __init__(self, message, line=None, path=None):
        self.message = message
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f"{':' if where else 'line '}{line}"
        super().__init__(f"{where}: {message}" if where else message)


class UndefinedMetricError(ToolkitError, ArithmeticError):
    """An error metric is undefined for the given truth values."""


class ConfigError(ToolkitError, ValueError):
    """A configuration document is malformed or names something unknown."""
