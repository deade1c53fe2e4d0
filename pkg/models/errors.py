"""
Exception hierarchy shared by services and command handlers
"""
from typing import Optional


class NearFieldError(Exception):
    """Base class for all toolkit errors"""

    exit_code: int = 1


class ConfigError(NearFieldError):
    """Experiment configuration could not be loaded or validated"""

    exit_code = 2

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:{line}: " if line is not None else f"{path}: "
        super().__init__(f"{location}{message}")


class NumericDomainError(NearFieldError, ValueError):
    """An argument lies outside the domain of a numerical operation"""

    exit_code = 3
