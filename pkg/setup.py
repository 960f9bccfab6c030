"""Optional compiled-kernel build; the package is fully functional without it.

The GF(p) rank kernels in fatlin/kernels/_fastrank.pyx are compiled when
Cython and a C toolchain are available.  Set FATLIN_SKIP_EXT=1 (or just lack
Cython) to install the pure-numpy fallback; the kernels package selects the
implementation at import time.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FATLIN_SKIP_EXT"):
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [Extension(
                "fatlin.kernels._fastrank",
                sources=["src/fatlin/kernels/_fastrank.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
