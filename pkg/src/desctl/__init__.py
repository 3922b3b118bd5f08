"""Supervisory-control toolkit for discrete-event systems."""

__version__ = "0.1.0"
