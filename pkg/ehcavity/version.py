"""Package version information - this file is dynamically overwritten in CI."""
__version__ = "0.0.0-dev"
