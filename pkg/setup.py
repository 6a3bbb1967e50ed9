"""Build script for the optional compiled kernels.

The package works without them: ``lmduality.kernels`` falls back to the
numpy implementation when ``lmduality._kernels`` cannot be imported.
"""
import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("LMDUALITY_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "lmduality._kernels",
                    [os.path.join("src", "lmduality", "_kernels.pyx")],
                    extra_compile_args=["-O3"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
