"""
Structured logging and tracing setup.

Library modules only call ``structlog.get_logger``; the CLI (or an embedding
application) calls :func:`configure_logging` once to pick renderers and
levels from :mod:`beamscint.src.config`.
"""

import logging
import sys

import logfire
import structlog

from .config import Settings, settings

_configured = False


def configure_logging(config: Settings | None = None, *, force: bool = False) -> None:
    """Configure structlog and logfire for the current process."""
    global _configured
    if _configured and not force:
        return
    config = config or settings

    level = getattr(logging, config.log_level.upper(), logging.WARNING)
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=level, force=True)

    renderer: structlog.types.Processor = (
        structlog.processors.JSONRenderer()
        if config.log_json
        else structlog.dev.ConsoleRenderer(colors=False)
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )

    logfire.configure(
        send_to_logfire=config.logfire_enabled,
        console=False if not config.logfire_console else None,
        service_name="beamscint",
    )
    _configured = True

    structlog.get_logger(__name__).debug(
        "Logging configured",
        level=config.log_level,
        json=config.log_json,
        logfire_enabled=config.logfire_enabled,
    )
