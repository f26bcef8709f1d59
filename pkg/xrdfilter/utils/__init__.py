"""Shared helpers: logging and small numerical utilities."""
