"""voidscope-models: graph and text models over query-domain SERP data."""

__version__ = "0.1.0"
