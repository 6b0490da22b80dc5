from __future__ import annotations


class ValidationError(ValueError):
    """Input violates a data invariant.

    ``path``, ``line`` and ``field`` are filled in when the failure can be
    pinned to a location in an input file.
    """

    def __init__(
        self,
        message: str,
        *,
        path: str | None = None,
        line: int | None = None,
        field: str | None = None,
    ) -> None:
        self.message = message
        self.path = path
        self.line = line
        self.field = field
        super().__init__(self._render())

    def _render(self) -> str:
        where = ""
        if self.path is not None:
            where = str(self.path)
            if self.line is not None:
                where += f":{self.line}"
            where += ": "
        if self.field is not None:
            where += f"{self.field}: "
        return where + self.message


class FormatError(ValidationError):
    """File layout is not the expected one (bad header, unparseable record)."""
