"""
Exact-arithmetic toolkit for Nil-Bohr and SG_k recurrence at desk scale.
"""

__version__ = "0.4.0"
