from pathlib import Path
from typing import Dict, Optional, Type, Union

from pydantic import ValidationError
from she_logging import logger

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_IO_ERROR = 2


class CsbmLabException(Exception):
    pass


class ConfigurationError(CsbmLabException, ValueError):
    pass


class DegenerateDirectionError(ConfigurationError):
    """sign(p - q) is undefined because p == q."""


class ZeroMeanError(ConfigurationError):
    pass


class DimensionMismatchError(CsbmLabException, ValueError):
    pass


class OutputError(CsbmLabException, OSError):
    def __init__(self, path: Union[str, Path], reason: str) -> None:
        super().__init__(f"{path}: {reason}")
        self.path = Path(path)
        self.reason = reason


EXIT_CODE_MAP: Dict[Type[BaseException], int] = {
    ConfigurationError: EXIT_CONFIG_ERROR,
    ValidationError: EXIT_CONFIG_ERROR,
    DimensionMismatchError: EXIT_CONFIG_ERROR,
    OutputError: EXIT_IO_ERROR,
    OSError: EXIT_IO_ERROR,
}


def exit_code_for(error: BaseException) -> Optional[int]:
    """Most specific exit code registered for the error, None if unhandled."""
    for error_type in type(error).__mro__:
        if error_type in EXIT_CODE_MAP:
            return EXIT_CODE_MAP[error_type]
    return None


def catch_cli_error(error: BaseException) -> int:
    exit_code = exit_code_for(error)
    if exit_code is None:
        raise error
    if exit_code == EXIT_IO_ERROR:
        logger.error("I/O failure: %s", error)
    else:
        logger.error("Invalid configuration: %s", error)
    return exit_code
