"""Masked-LM inference service speaking the tokenize/predict wire protocol."""
from .app import create_app
from .modelhost import MaskError, ModelHost, Prediction, format_decimal

__all__ = ["MaskError", "ModelHost", "Prediction", "create_app", "format_decimal"]
