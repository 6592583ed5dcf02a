"""HTTP embedding microservice with a bit-exact deterministic test mode."""

__version__ = "0.1.0"

from .app import create_app  # noqa: F401
from .hashing import hash_embed  # noqa: F401
