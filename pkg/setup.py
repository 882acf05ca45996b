"""Build script: compiles the optional brute-force kernel.

The package is pure Python except for hdxcones._kernel, a Cython module
holding the inner loops of the exhaustive expansion-constant search.  If
Cython or a C compiler is unavailable the package installs without it and
falls back to the pure-Python implementation at import time.
"""

from setuptools import setup

ext_modules = []
try:
    import os

    from Cython.Build import cythonize
    import numpy

    if not os.path.exists("src/hdxcones/_kernel.pyx"):
        raise ImportError("kernel source not present")
    ext_modules = cythonize(
        "src/hdxcones/_kernel.pyx",
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
    for ext in ext_modules:
        ext.include_dirs.append(numpy.get_include())
except ImportError:
    pass

setup(ext_modules=ext_modules)
