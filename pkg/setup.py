import os

from setuptools import Extension, setup

ext_modules = []
if not os.environ.get("GASNET_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("gasnet._kernels", ["src/gasnet/_kernels.pyx"])],
            language_level=3,
        )
    except ImportError:
        # Pure-Python kernels are used when the extension is unavailable.
        ext_modules = []

setup(ext_modules=ext_modules)
