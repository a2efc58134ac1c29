"""voidscope: audit toolkit for search-engine warning banners and data voids."""

__version__ = "0.1.0"
