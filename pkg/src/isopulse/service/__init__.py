"""HTTP service wrapping the core package."""


def create_app():
    """Build the FastAPI application (imported lazily so that library
    and CLI use stay light)."""
    from .app import create_app as _create_app
    return _create_app()


__all__ = ["create_app"]