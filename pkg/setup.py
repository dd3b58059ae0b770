"""Build script: compiles the optional fast kernels.

The package works without the compiled extension (a pure-Python mirror of
every kernel is selected at import time), so a failed Cython build only
costs speed, never functionality.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "flownn._core._ckernels",
                ["src/flownn/_core/_ckernels.pyx"],
                include_dirs=[numpy.get_include()],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                # fp-contract off: the pure-Python fallback must produce
                # bit-identical results, so no FMA contraction allowed.
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
