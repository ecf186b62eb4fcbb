"""
Configuration settings for the incompressible membrane simulator.
"""

from .settings import Settings, settings

__all__ = ["Settings", "settings"]
