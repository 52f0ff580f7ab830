"""Explicit opposition involutions and totally-real descent for Shimura data."""

__version__ = "0.1.0"
