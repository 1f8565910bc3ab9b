"""One-loop corrections for sine-Gordon and phi^4 kinks and periodic solutions."""

__version__ = "0.1.0"
