"""
Logging Configuration
Single stream handler for the solver, CLI and web service
"""

import logging

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'

_configured = False


def configure_logging(level: str = 'INFO') -> None:
    """Install the stream handler once and set the root level"""
    global _configured
    root = logging.getLogger()
    root.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    if _configured:
        return
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    _configured = True
