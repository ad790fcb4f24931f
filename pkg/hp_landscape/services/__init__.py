"""Analysis and signal-processing services."""
