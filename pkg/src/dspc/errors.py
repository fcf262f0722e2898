"""Exception hierarchy shared by the graph, index and harness layers."""

from __future__ import annotations


class DspcError(Exception):
    """Base class for every error raised by this package."""


class GraphError(DspcError, ValueError):
    """Illegal structural operation on a graph (self-loop, duplicate edge, dead vertex ...)."""


class CapacityError(GraphError):
    """Vertex id would not fit the 25-bit hub field."""


class ParseError(DspcError, ValueError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


class LabelError(DspcError, ValueError):
    """Forbidden label mutation, e.g. removing a self-label."""


class PackOverflowError(DspcError, OverflowError):
    def __init__(self, field: str, value: int, bits: int):
        self.field = field
        self.value = value
        self.bits = bits
        super().__init__(f"pack overflow: {field} ({value} does not fit {bits} bits)")


class CountOverflowError(DspcError, OverflowError):
    """A shortest-path count exceeded the 64-bit in-memory width."""


class IndexFormatError(DspcError, ValueError):
    """Malformed or inconsistent serialized index."""
