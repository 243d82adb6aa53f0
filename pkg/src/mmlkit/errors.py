"""Exception hierarchy shared by all mmlkit modules."""


class MmlError(Exception):
    """Base class for every error raised by mmlkit."""


# -- parsing / document model -------------------------------------------------

class MalformedInput(MmlError):
    """Input is not a single well-formed MathML math element."""


class DuplicateId(MmlError):
    """Two nodes in one document carry the same id attribute value."""

    def __init__(self, id_value: str):
        super().__init__(f"duplicate id {id_value!r}")
        self.id_value = id_value


class MissingBranch(MmlError):
    """The requested presentation/content branch is not present."""


class WouldBeEmpty(MmlError):
    """Cleaning would leave the document without any math content."""


# -- query --------------------------------------------------------------------

class PathSyntaxError(MmlError):
    """A path expression failed to parse; carries the error position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownName(MmlError):
    """No library entry with the requested name."""


# -- similarity ---------------------------------------------------------------

class EmptyHistogram(MmlError):
    """A measure that needs a non-zero vector was given an empty histogram."""


# -- gold ---------------------------------------------------------------------

class SchemaError(MmlError):
    """A gold file violates the record schema (missing field, bad type, duplicate id)."""


class InvalidGoldMathML(MmlError):
    """A gold entry's reference MathML fails strict parsing or lacks a branch."""

    def __init__(self, entry_id: int, reason: str):
        super().__init__(f"entry {entry_id}: {reason}")
        self.entry_id = entry_id
        self.reason = reason


# -- converters ---------------------------------------------------------------

class DuplicateName(MmlError):
    """A converter with this name is already registered."""


class UnknownConverter(MmlError):
    """No converter registered under the requested name."""


class ToolUnavailable(MmlError):
    """The converter's executable could not be started."""


class ToolFailed(MmlError):
    """The converter process exited with a non-zero status."""

    def __init__(self, tool: str, exit_code: int, stderr_excerpt: str):
        super().__init__(f"{tool} exited with status {exit_code}: {stderr_excerpt!r}")
        self.tool = tool
        self.exit_code = exit_code
        self.stderr_excerpt = stderr_excerpt


class ToolTimeout(MmlError):
    """The converter process did not finish within its timeout."""


class OutputNotMathML(MmlError):
    """The converter produced output that does not parse as MathML."""

    def __init__(self, tool: str, raw: str, reason: str):
        super().__init__(f"{tool} produced non-MathML output: {reason}")
        self.tool = tool
        self.raw = raw
        self.reason = reason
