"""Build script: compiles the Monte Carlo stepping kernel when Cython is
available, otherwise installs the pure-Python package (the numpy fallback
kernel is selected at import time)."""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "oubridge._stepper",
                ["src/oubridge/_stepper.pyx"],
                # -ffp-contract=off keeps the C arithmetic bit-identical to the
                # numpy fallback (no FMA fusion).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
except ImportError:
    pass

setup(ext_modules=ext_modules)
