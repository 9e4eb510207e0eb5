"""padiff: exact-arithmetic workbench for p-adic differential modules.

The package computes horizontal sections, log-growth orders and generic
radii of convergence for differential modules over the bounded power
series ring on the open unit p-adic disc, and runs the exterior-power
construction that extracts the solvable part of such a module.
"""

from padiff.padic import PadicNumber, PrecisionError, DEFAULT_PRECISION

__all__ = ["PadicNumber", "PrecisionError", "DEFAULT_PRECISION"]

__version__ = "0.1.0"
