"""Build script: compiles the optional Cython kernel module.

The package works without the extension (a numpy fallback is selected at
import time), so compilation failures only emit a warning.
"""

import sys

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.errors import CCompilerError, ExecError, PlatformError


def make_extensions():
    try:
        import numpy
        from Cython.Build import cythonize
        from setuptools import Extension
    except ImportError:
        print("currentlab: Cython or numpy unavailable at build time, "
              "skipping compiled kernels", file=sys.stderr)
        return []
    ext = Extension(
        "currentlab.kernels._core",
        sources=["src/currentlab/kernels/_core.pyx"],
        include_dirs=[numpy.get_include()],
        define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
    )
    return cythonize([ext], language_level=3)


class optional_build_ext(build_ext):
    """Skip the extension instead of failing the whole install."""

    def run(self):
        try:
            build_ext.run(self)
        except (PlatformError, FileNotFoundError) as err:
            self._warn(err)

    def build_extension(self, ext):
        try:
            build_ext.build_extension(self, ext)
        except (CCompilerError, ExecError, PlatformError, ValueError) as err:
            self._warn(err)

    @staticmethod
    def _warn(err):
        print("currentlab: compiled kernels skipped (%s); the pure numpy "
              "backend will be used" % err, file=sys.stderr)


setup(
    ext_modules=make_extensions(),
    cmdclass={"build_ext": optional_build_ext},
)
