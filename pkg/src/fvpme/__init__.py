"""
fvpme: two-point finite volumes with BDF2 time stepping for the porous medium equation.
"""

__version__ = "0.1.0"
