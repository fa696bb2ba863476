"""Hot-loop kernels, compiled when the Cython extension is built.

``BACKEND`` is ``"cython"`` or ``"python"`` depending on what imported.
Both modules expose ``threshold_edges`` and ``symmetric_eigh`` with
identical signatures.
"""

from . import _pycore

try:
    from . import _core
except ImportError:  # extension not built
    _core = None

if _core is not None:
    BACKEND = "cython"
    threshold_edges = _core.threshold_edges
    symmetric_eigh = _core.symmetric_eigh
else:
    BACKEND = "python"
    threshold_edges = _pycore.threshold_edges
    symmetric_eigh = _pycore.symmetric_eigh


def backends():
    """Map backend name to module for every backend available in this install."""
    out = {"python": _pycore}
    if _core is not None:
        out["cython"] = _core
    return out
