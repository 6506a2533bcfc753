"""Finite-scale verification of descent-theoretic exact sequences.

Rings are finite and stored by structure constants over their additive
groups, modules by integer action matrices and coalgebras by their
comultiplication tensors over a finite field.  The main entry points are
the sequence verifiers in ``descent``, the Amitsur complexes in ``amitsur``
and ``coalgebra``, and the command line in ``cli``.
"""
from .errors import DescentKitError

__version__ = "0.1.0"

__all__ = ["DescentKitError", "__version__"]
