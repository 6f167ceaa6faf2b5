"""Free path lengths among lattice scatterers with a congruence constraint."""

__version__ = "0.1.0"
