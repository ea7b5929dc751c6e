"""Bundled example model documents (JSON files shipped with the package)."""
