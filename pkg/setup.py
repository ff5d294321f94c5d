# The compiled frame-forcing kernel is optional: when Cython (or a C compiler)
# is unavailable the install proceeds and kappafol.fastcore falls back to the
# pure-Python twin at import time.
from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/kappafol/_speedups.pyx"],
        compiler_directives={"language_level": 3, "boundscheck": False, "wraparound": False},
    )
except Exception as exc:  # pragma: no cover - build environment dependent
    print("kappafol: building without the compiled kernel (%s)" % exc)

setup(ext_modules=ext_modules)
