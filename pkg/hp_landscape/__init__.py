"""hp-landscape - grid-search landscape analysis and vibration dataset variants."""

__version__ = "0.1.0"
