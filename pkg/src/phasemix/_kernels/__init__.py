"""Backend selection for the hot integrator kernel.

Prefers the compiled Cython extension; falls back to a NumPy
implementation with identical semantics when the extension is missing
(e.g. a source checkout without a build step).
"""

try:  # pragma: no cover - depends on the build environment
    from ._leapfrog import leapfrog

    BACKEND = "compiled"
except ImportError:  # pragma: no cover
    from ._fallback import leapfrog

    BACKEND = "python"

from ._fallback import leapfrog as leapfrog_fallback

__all__ = ["leapfrog", "leapfrog_fallback", "BACKEND"]
