"""Agent-based wealth exchange with joint-venture, redistribution and WE-economy rules."""

__version__ = "0.1.0"
