"""Lelong.

Generalized Lelong numbers of model currents against plurisubharmonic
weights, with a verification panel for the identities relating them.
"""

__version__ = "0.1.0"

from lelong.graph import graph  # noqa: E402

__all__ = ["graph", "__version__"]
