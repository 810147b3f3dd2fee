"""News topic, sentiment-bias, and poll time-series analysis."""

__version__ = "0.1.0"
