"""
Utility functions for the membrane simulator.
"""
