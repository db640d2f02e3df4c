"""Builds the optional Cython core; the package falls back to pure Python without it."""
import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("PADICDS_NO_EXT"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        pass
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "padicds._ckernels",
                    ["src/padicds/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    extra_compile_args=["-O3"],
                    optional=True,
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
