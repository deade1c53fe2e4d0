"""
Error handling middleware for command handlers
"""
import functools
import logging
from typing import Callable

from pydantic import ValidationError

from models.errors import ConfigError, NearFieldError, NumericDomainError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1


def handle_errors(handler: Callable) -> Callable[..., int]:
    """
    Wrap a command handler so it returns a process exit code.

    0 on success, 2 for configuration errors, 3 for numeric-domain errors,
    1 for anything else (logged with its traceback).
    """
    @functools.wraps(handler)
    def wrapper(*args, **kwargs) -> int:
        try:
            result = handler(*args, **kwargs)
        except ConfigError as e:
            logger.error("Configuration error: %s", e)
            return e.exit_code
        except NumericDomainError as e:
            logger.error("Numeric domain error: %s", e)
            return e.exit_code
        except ValidationError as e:
            logger.error("Invalid value: %s", e)
            return NumericDomainError.exit_code
        except NearFieldError as e:
            logger.error("%s", e)
            return e.exit_code
        except KeyboardInterrupt:
            logger.warning("Interrupted")
            return EXIT_FAILURE
        except Exception:
            logger.exception("Unexpected error in %s", handler.__name__)
            return EXIT_FAILURE
        return result if isinstance(result, int) else EXIT_OK

    return wrapper
