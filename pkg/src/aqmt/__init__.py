"""Simulator for anonymous transmission of quantum messages over a GHZ-based network."""

__version__ = "0.1.0"
