"""Builds the optional Cython kernels; the package still installs without them."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("ANGQUDIT_NO_EXT", "") in ("", "0"):
    try:
        import numpy as np
        from Cython.Build import cythonize
    except ImportError:
        print("angqudit: Cython or numpy missing, skipping compiled kernels")
    else:
        ext_modules = cythonize(
            [
                Extension(
                    "angqudit._ckernels",
                    ["src/angqudit/_ckernels.pyx"],
                    include_dirs=[np.get_include()],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                    extra_compile_args=["-O3"],
                )
            ],
            language_level=3,
            quiet=True,
        )

setup(ext_modules=ext_modules)
