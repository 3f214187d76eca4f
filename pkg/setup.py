"""Build script for the optional compiled kernels.

The package works without the extension: chapterseg.kernels falls back to
the pure-Python implementation when chapterseg._kernels is missing.
"""

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class OptionalBuildExt(build_ext):
    """Build the extension if possible; install pure-Python otherwise."""

    def run(self):
        try:
            super().run()
        except Exception as exc:  # missing compiler, cython, ...
            print(f"WARNING: skipping compiled kernels ({exc}); "
                  "pure-Python fallback will be used")

    def build_extension(self, ext):
        try:
            super().build_extension(ext)
        except Exception as exc:
            print(f"WARNING: could not build {ext.name} ({exc}); "
                  "pure-Python fallback will be used")


def extensions():
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension(
        "chapterseg._kernels",
        ["src/chapterseg/_kernels.pyx"],
        extra_compile_args=["-O3"],
    )
    return cythonize([ext], compiler_directives={"language_level": "3"})


setup(ext_modules=extensions(), cmdclass={"build_ext": OptionalBuildExt})
