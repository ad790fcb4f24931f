"""Settings, logging, errors and shared plumbing."""
