"""martlat: exact computation with filtrations and abstract martingales
on concrete vector lattices."""

__version__ = "0.1.0"
