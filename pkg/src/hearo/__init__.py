"""Parametrized fully-connected DNNs for heart-disease classification."""

__version__ = "0.1.0"
