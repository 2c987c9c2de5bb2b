"""Build script: compiles the optional accelerator extension.

The package works without the extension (a pure-Python kernel with the
same semantics is selected at import time), so compilation failures are
non-fatal.  Set MINDENOM_PURE_PYTHON=1 to skip the extension entirely.

-ffp-contract=off keeps the compiler from fusing multiply-adds, and
-fno-builtin-sin/-fno-builtin-cos keep it from merging adjacent cos/sin
calls into glibc sincos (which can differ from the separate calls by one
ulp), so the float paths in the C kernel agree bit-for-bit with the
Python kernel.
"""

import os

from setuptools import Extension, setup

extensions = []
if not os.environ.get("MINDENOM_PURE_PYTHON"):
    try:
        from Cython.Build import cythonize

        extensions = cythonize(
            [
                Extension(
                    "mindenom._ckernel",
                    ["src/mindenom/_ckernel.pyx"],
                    extra_compile_args=[
                        "-O2",
                        "-ffp-contract=off",
                        "-fno-builtin-sin",
                        "-fno-builtin-cos",
                    ],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        extensions = []

setup(ext_modules=extensions)
