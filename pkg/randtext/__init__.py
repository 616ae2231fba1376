"""Random-text null model: closed-form predictions, seeded simulation and corpus comparison."""

__version__ = "0.1.0"
