"""Build the optional compiled core.

The package is pure Python plus one Cython extension holding the two hot
kernels (isotropic subspace scanning and the exact-cover search).  If
Cython or a C compiler is unavailable the install still succeeds and the
package transparently uses the pure-Python fallback in _pykernels.py.
"""

import os

from setuptools import Extension, setup

ext_modules = []
try:
    if not os.path.exists("src/polarcover/_speedups.pyx"):
        raise ImportError
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "polarcover._speedups",
                ["src/polarcover/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
