"""floodlib - flood-level regularized training with adaptive per-sample flood levels."""

__version__ = "0.1.0"
