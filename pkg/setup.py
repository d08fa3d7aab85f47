"""Build script for the optional compiled kernels.

The Cython extension is optional: when Cython or a C compiler is unavailable
the package installs without it and falls back to ``frugality._kernels_py``.
"""
import os

from setuptools import setup

ext_modules = []
if not os.environ.get("FRUGALITY_NO_EXT"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [Extension("frugality._kernels", ["src/frugality/_kernels.pyx"],
                       extra_compile_args=["-O3"])],
            compiler_directives={"language_level": "3", "boundscheck": False,
                                 "wraparound": False},
        )

setup(ext_modules=ext_modules)
