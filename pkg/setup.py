"""Build script: compiles the optional Cython kernel.

The package works without the extension (a NumPy fallback is selected at
import time), so a failed compilation downgrades to a warning instead of
aborting the install.
"""

import warnings

import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "phasemix._kernels._leapfrog",
                ["src/phasemix/_kernels/_leapfrog.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    warnings.warn(f"Cython kernel not built ({exc}); using NumPy fallback")
    ext_modules = []

setup(ext_modules=ext_modules)
