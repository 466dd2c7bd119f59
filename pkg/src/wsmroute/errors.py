"""Exception hierarchy. Every error carries a short ``tag`` the CLI prints."""


class WsmRouteError(Exception):
    tag = "error"


class InvalidDimensionError(WsmRouteError, ValueError):
    tag = "invalid-dimension"


class ParseError(WsmRouteError, ValueError):
    tag = "parse-error"

    def __init__(self, message, *, line=None, position=None, token=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if position is not None:
            where.append(f"position {position}")
        if where:
            message = f"{', '.join(where)}: {message}"
        super().__init__(message)
        self.line = line
        self.position = position
        self.token = token


class ConsistencyError(WsmRouteError):
    tag = "consistency-error"


class UnknownNodeError(WsmRouteError, KeyError):
    tag = "unknown-node"

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class NotInterTileError(WsmRouteError):
    tag = "not-inter-tile"


class PlacementError(WsmRouteError):
    tag = "placement-error"


class UnroutableError(WsmRouteError):
    tag = "unroutable"


class FixedRouteViolation(WsmRouteError):
    tag = "fixed-route-violation"


class KindUnusableError(WsmRouteError):
    tag = "kind-unusable"


class CalibrationError(WsmRouteError):
    tag = "calibration-error"


class InfeasibleCellDelayError(CalibrationError):
    tag = "infeasible-cell-delay"


class ModelIncompleteError(WsmRouteError):
    tag = "model-incomplete"


class ConfigError(WsmRouteError):
    tag = "config-error"


class EmptyReportError(WsmRouteError):
    tag = "empty-report"
