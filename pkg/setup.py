from setuptools import Extension, setup

try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "omega_forge._speedups",
                ["src/omega_forge/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except ImportError:
    # Pure-Python fallback is selected at import time; the wheel still works.
    extensions = []

setup(ext_modules=extensions)
