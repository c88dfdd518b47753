"""mapgenus: exact genus expansions of random-matrix free energies and
ground-truth map enumeration on surfaces."""

__version__ = "0.1.0"
