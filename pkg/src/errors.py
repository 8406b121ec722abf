"""Exception hierarchy shared by every PPRL package"""

from typing import Optional


class PPRLError(Exception):
    """Base class for all library errors"""


class InvalidArgumentError(PPRLError, ValueError):
    """A precondition on an argument (shape, range, count) was violated"""


class DegenerateInputError(InvalidArgumentError):
    """Input is well-formed but degenerate (empty crop, zero extent)"""


class InvalidStateError(PPRLError, RuntimeError):
    """Operation is not allowed in the object's current state"""


class ConfigError(PPRLError):
    """Configuration could not be loaded or failed validation"""

    def __init__(
        self,
        message: str,
        source: Optional[str] = None,
        line: Optional[int] = None,
        key_path: Optional[str] = None
    ):
        self.message = message
        self.source = source
        self.line = line
        self.key_path = key_path
        super().__init__(self.__str__())

    def __str__(self) -> str:
        location = ""
        if self.source:
            location = self.source
            if self.line is not None:
                location += f":{self.line}"
            location += ": "
        key = f"{self.key_path}: " if self.key_path else ""
        return f"{location}{key}{self.message}"


class CloudParseError(PPRLError, ValueError):
    """Malformed point-cloud text file"""

    def __init__(self, message: str, line_number: int, source: Optional[str] = None):
        self.line_number = line_number
        self.source = source
        prefix = f"{source}:" if source else "line "
        super().__init__(f"{prefix}{line_number}: {message}")


class CheckpointError(PPRLError):
    """Checkpoint blob is unreadable or does not match the requested setup"""
