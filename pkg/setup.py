"""Build script for the optional compiled engine.

The extension is marked optional: if Cython or a C compiler is missing the
package still installs and ``gmab`` falls back to its pure-Python engine.
"""
import os

from setuptools import Extension, setup

try:
    import numpy as np
    from Cython.Build import cythonize
except ImportError:  # pragma: no cover - build without Cython
    ext_modules = []
else:
    # fp-contract off keeps float results identical to the Python engine
    extra = ["-O2", "-ffp-contract=off", "-fno-fast-math"]
    if os.name == "nt":  # pragma: no cover
        extra = ["/O2", "/fp:precise"]
    ext_modules = cythonize(
        [
            Extension(
                "gmab._engine",
                ["src/gmab/_engine.pyx"],
                include_dirs=[np.get_include()],
                extra_compile_args=extra,
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
