"""Build script: compiles the scheduling kernel extension when Cython is
available; the package falls back to the pure-Python kernel otherwise."""

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "mrtaga._native",
                ["src/mrtaga/_native.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
