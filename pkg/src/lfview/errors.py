"""Exception types shared across the viewer pipeline."""


class LfviewError(Exception):
    """Base class for all package-specific errors."""


class MissingViewError(LfviewError):
    """A view file referenced by the filename template does not exist."""

    def __init__(self, row: int, col: int, path=None):
        self.row = row
        self.col = col
        self.path = path
        where = f" ({path})" if path is not None else ""
        super().__init__(f"missing view at grid position ({row}, {col}){where}")


class DimensionMismatchError(LfviewError):
    """Image dimensions differ where they are required to match."""


class DecodeError(LfviewError):
    """An image file exists but cannot be decoded."""

    def __init__(self, path, reason: str = ""):
        self.path = path
        suffix = f": {reason}" if reason else ""
        super().__init__(f"cannot decode image {path}{suffix}")


class IndivisibleAtlasError(LfviewError):
    """Atlas dimensions are not divisible by the requested grid layout."""


class MalformedMessage(LfviewError):
    """A wire message is structurally invalid (bad JSON, missing keys, bad types)."""


class StaleMessage(LfviewError):
    """A wire message is older than the last accepted one; dropped, not fatal."""
