"""HTTP service wrapping the simulator, campaign runner and analysis toolkit."""

from polepi.service.app import create_app

__all__ = ["create_app"]
