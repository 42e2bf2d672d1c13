import logging
from typing import Any, Mapping, MutableMapping, Optional, Tuple


class ContextLogger(logging.LoggerAdapter):
    """A command line logger that prefixes every message with its bound run context."""

    def __init__(
        self,
        name: str = __name__,
        extra: Optional[Mapping[str, object]] = None,
    ) -> None:
        """Initializes a logger whose messages carry contextual key-value pairs, e.g. the
        subject being analysed or the current pipeline stage.

        :param name: The name of the logger. Default is ``__name__``.
        :param extra: (Optional) Context rendered as ``[key=value ...]`` in front of each message.
        """
        logger = logging.getLogger(name)
        super().__init__(logger=logger, extra=dict(extra or {}))

    def bind(self, **context: object) -> "ContextLogger":
        """Returns a child logger with additional context.

        :param context: Key-value pairs merged over the current context.
        :return: A new `ContextLogger` sharing the underlying logger.
        """
        return ContextLogger(self.logger.name, extra={**self.extra, **context})

    def process(
        self, msg: Any, kwargs: MutableMapping[str, Any]
    ) -> Tuple[Any, MutableMapping[str, Any]]:
        if self.extra:
            prefix = " ".join(f"{key}={value}" for key, value in self.extra.items())
            msg = f"[{prefix}] {msg}"
        return msg, kwargs
