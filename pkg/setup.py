"""Build script: compiles the optional DG hot-kernel extension.

The extension is a speedup only; if Cython or a C compiler is missing the
install proceeds and the package falls back to the pure-NumPy kernels at
import time.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build C extensions, but never fail the install over them."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # pragma: no cover - depends on toolchain
            sys.stderr.write(f"warning: skipping compiled kernels ({exc})\n")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:  # pragma: no cover - depends on toolchain
            sys.stderr.write(
                f"warning: could not build {ext.name} ({exc}); "
                "pure-Python kernels will be used\n"
            )


def _extensions():
    try:
        import numpy
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - depends on toolchain
        return []
    from setuptools import Extension

    ext = Extension(
        "ocad.dg._kernels",
        ["src/ocad/dg/_kernels.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


setup(ext_modules=_extensions(), cmdclass={"build_ext": OptionalBuildExt})
