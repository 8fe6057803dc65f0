"""Build script for the optional compiled kernel extension.

The package works without the extension (pure numpy/scipy fallback is
selected at import time); building it just speeds up the hot loops.
Build in place with:

    python3 setup.py build_ext --inplace
"""
from setuptools import setup

ext_modules = []
try:
    import numpy as np
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "pdp.kernels._fast",
                ["src/pdp/kernels/_fast.pyx"],
                include_dirs=[np.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
