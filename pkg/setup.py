"""Build script: compiles the optional Cython sweep kernels.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile is tolerated rather than fatal.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "eigenmp._speedups",
                ["src/eigenmp/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={
            "language_level": "3",
            "boundscheck": False,
            "wraparound": False,
            "cdivision": True,
        },
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print("eigenmp: Cython unavailable, building without compiled kernels:", exc)

setup(ext_modules=ext_modules)
