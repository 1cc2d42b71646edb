"""Builds the optional compiled LSTM kernel; the package falls back to the
pure NumPy implementation when the extension is unavailable."""

import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

extensions = [
    Extension(
        "jmt.kernels._lstm",
        ["src/jmt/kernels/_lstm.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
]

setup(ext_modules=cythonize(extensions, language_level=3))
