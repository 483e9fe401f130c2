"""agilint: an agile-process lint engine over a property graph of
development artifacts."""

__version__ = "0.1.0"
