import numpy
from setuptools import Extension, setup

# The extension is optional: without Cython the package installs with the
# pure-numpy kernel backend. -ffp-contract=off keeps the compiler from
# fusing multiply-adds, which would break bit parity with that backend.
try:
    from Cython.Build import cythonize

    ext = Extension(
        "afforge._kernels._core",
        sources=["src/afforge/_kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        extra_compile_args=["-O2", "-ffp-contract=off"],
    )
    ext_modules = cythonize([ext], language_level=3)
except ImportError:
    ext_modules = []

setup(ext_modules=ext_modules)
