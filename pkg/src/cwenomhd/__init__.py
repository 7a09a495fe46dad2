"""Fourth-order CWENO finite-volume ideal-MHD solver with constrained transport."""

__version__ = "0.1.0"
