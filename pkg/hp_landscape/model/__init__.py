"""Core data model: hyperparameter spaces, configs and results tables."""
