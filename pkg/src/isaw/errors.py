from __future__ import annotations


class ParseError(ValueError):
    """Raised on malformed program, spec or LTS text.

    ``pos`` is the 0-based character offset of the offending token when known.
    """

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class StateBoundExceeded(RuntimeError):
    """A product or service exploration grew past the configured state bound."""

    def __init__(self, bound: int, what: str = "state space"):
        self.bound = bound
        super().__init__(f"{what} exceeds state bound {bound}")
