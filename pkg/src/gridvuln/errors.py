"""Exception hierarchy shared across the package."""


class GridVulnError(Exception):
    """Base class for all package errors."""


class GridDataError(GridVulnError, ValueError):
    """Malformed or inconsistent temporal grid records.

    ``line`` and ``field`` locate the offending CSV cell when known.
    """

    def __init__(self, message, line=None, field=None):
        self.line = line
        self.field = field
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class EmptySnapshotError(GridDataError):
    """Requested year has no active elements."""


class GraphError(GridVulnError, ValueError):
    """Invalid graph construction or out-of-range index."""


class UndefinedMetricError(GridVulnError, ValueError):
    """Metric is mathematically undefined for the given graph."""


class FitError(GridVulnError, ValueError):
    """Too few support points for a least-squares fit."""


class InfeasibleScenarioError(GridVulnError, ValueError):
    """Removal scenario cannot be executed on the graph."""


class BudgetExceededError(InfeasibleScenarioError):
    """Exhaustive search would exceed the configured evaluation budget."""
