import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "fracdil._kernels",
                ["src/fracdil/_kernels.pyx"],
                extra_compile_args=["-O3"],
                include_dirs=[numpy.get_include()],
            )
        ],
        language_level=3,
    )
except ImportError:
    # Pure-Python fallback in fracdil._backend covers the missing extension.
    extensions = []

setup(ext_modules=extensions)
