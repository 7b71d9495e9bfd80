"""Builds the optional compiled kernels.

The package is fully functional without the extension: a pure-Python
backend is selected at import time when the compiled module is absent.
Set EQRANK_SKIP_EXTENSION=1 to force a pure-Python install.
"""

import os

from setuptools import setup


def extension_modules():
    if os.environ.get("EQRANK_SKIP_EXTENSION"):
        return []
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        return []
    ext = Extension(
        "eqrank._kernels._ckernels",
        sources=["src/eqrank/_kernels/_ckernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O3"],
    )
    return cythonize(
        [ext],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )


setup(ext_modules=extension_modules())
