"""Build script: compiles the optional Cython kernel extension.

The package is fully functional without the extension (a pure-numpy
fallback is selected at import time), so any failure to cythonize or
compile downgrades to a pure-Python install instead of aborting.
"""

import sys

from setuptools import Extension, setup


def extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError as exc:
        print(f"cqm: Cython/numpy unavailable ({exc}); building without native kernels",
              file=sys.stderr)
        return []
    ext = Extension(
        "cqm._kernels._native",
        ["src/cqm/_kernels/_native.pyx"],
        include_dirs=[numpy.get_include()],
        extra_compile_args=["-O3"],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    try:
        return cythonize([ext], language_level=3)
    except Exception as exc:  # pragma: no cover - build-host dependent
        print(f"cqm: cythonize failed ({exc}); building without native kernels",
              file=sys.stderr)
        return []


setup(ext_modules=extensions())
