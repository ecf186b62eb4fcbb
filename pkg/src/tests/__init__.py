"""
Test suite for the incompressible membrane simulator.
"""
