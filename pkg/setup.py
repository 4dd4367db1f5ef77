"""Build script for the compiled Monte Carlo core.

The package works without the extension (a pure-numpy backend is selected at
import time); building it just makes the hot loops faster.
"""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

ext = Extension(
    "levywalk._kernels._core",
    ["src/levywalk/_kernels/_core.pyx"],
    include_dirs=[numpy.get_include()],
    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
)

setup(ext_modules=cythonize([ext], language_level="3"))
