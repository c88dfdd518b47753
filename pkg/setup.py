"""Build script: compiles the optional matching-enumeration kernel.

The extension is a pure speedup; when Cython or a C compiler is missing the
package installs without it and mapgenus falls back to the pure-Python twin
at import time.
"""

from setuptools import Extension, setup

extensions = []
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "mapgenus._mapcore",
                ["src/mapgenus/_mapcore.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": 3},
    )
except ImportError:
    print("Cython not available; skipping the compiled kernel (pure fallback active)")

setup(ext_modules=extensions)
