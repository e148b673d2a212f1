"""Build script for the optional compiled flow kernel.

The package is fully functional without the extension (a pure Python
kernel is selected at import time), so the build can be forced to skip it
with CAYLEY_STEINER_NO_EXT=1.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("CAYLEY_STEINER_NO_EXT"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "cayley_steiner._flowcore",
                    ["src/cayley_steiner/_flowcore.pyx"],
                )
            ],
            language_level=3,
        )

setup(ext_modules=ext_modules)
