"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-NumPy backend is selected
at import time), so a failed compile only costs speed, never installability.
"""

import sys

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "vicon._kernels_c",
                ["src/vicon/_kernels_c.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
        compiler_directives={
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
            "initializedcheck": False,
        },
    )
except ImportError as exc:
    sys.stderr.write(
        "vicon: Cython/NumPy unavailable at build time (%s); "
        "installing with the pure-NumPy backend only.\n" % exc
    )

setup(ext_modules=ext_modules)
