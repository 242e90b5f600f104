"""
Logging for the floorlattice engine: one application log plus the elimination step trace
"""

import logging
from typing import Optional
from config.settings import settings


class EngineLog:
    """Owner of the application logger tree.

    Module loggers are children of settings.APP_NAME and propagate to it, so the file
    and console handlers are installed once. The step trace is a separate channel
    that stays silent until a file is attached.
    """

    _instance: Optional['EngineLog'] = None
    _root: Optional[logging.Logger] = None
    _trace: Optional[logging.Logger] = None

    def __new__(cls) -> 'EngineLog':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
            cls._instance._configure()
        return cls._instance

    def _configure(self) -> None:
        """Install the file and console handlers and the silent trace channel"""
        self._root = logging.getLogger(settings.APP_NAME)
        self._root.setLevel(getattr(logging, settings.LOG_LEVEL))
        self._root.propagate = False
        if not self._root.handlers:
            formatter = logging.Formatter(settings.LOG_FORMAT)

            # Everything from INFO up goes to the log file
            file_handler = logging.FileHandler(settings.get_log_path(), encoding='utf-8')
            file_handler.setLevel(logging.INFO)
            file_handler.setFormatter(formatter)

            # stdout carries results, so the console only sees warnings on stderr
            console_handler = logging.StreamHandler()
            console_handler.setLevel(getattr(logging, settings.CONSOLE_LOG_LEVEL))
            console_handler.setFormatter(formatter)

            self._root.addHandler(file_handler)
            self._root.addHandler(console_handler)

        self._trace = logging.getLogger(settings.TRACE_LOGGER_NAME)
        if not self._trace.handlers:
            self._trace.addHandler(logging.NullHandler())
        self._trace.setLevel(logging.INFO)
        self._trace.propagate = False

    def module_logger(self, name: str) -> logging.Logger:
        """Child of the application logger named after a module"""
        if name == settings.APP_NAME or name.startswith(settings.APP_NAME + "."):
            return logging.getLogger(name)
        return self._root.getChild(name)

    @property
    def trace(self) -> logging.Logger:
        return self._trace


def get_logger(name: str = __name__) -> logging.Logger:
    """Get a logger instance for the specified module"""
    return EngineLog().module_logger(name)


def get_trace_logger() -> logging.Logger:
    """The elimination step trace: one `<variable> <pass> atoms=<n>` line per pass"""
    return EngineLog().trace


def attach_trace_file(path: str) -> logging.Handler:
    """Route the step trace to a line-oriented file"""
    handler = logging.FileHandler(path, mode='w', encoding='utf-8')
    handler.setFormatter(logging.Formatter(settings.TRACE_FORMAT))
    get_trace_logger().addHandler(handler)
    return handler


def detach_trace_file(handler: logging.Handler) -> None:
    """Remove a handler installed by attach_trace_file"""
    get_trace_logger().removeHandler(handler)
    handler.close()
