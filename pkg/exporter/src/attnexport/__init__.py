"""Attention-capture exporter and token-block packer for local checkpoints."""

__version__ = "0.1.0"
