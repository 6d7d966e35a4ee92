"""Build script: compiles the optional Cython kernel extension.

The package works without the extension (a pure-numpy fallback is selected
at import time), so any failure here is non-fatal by design: run
``pip install -e . --no-build-isolation`` and check
``shakhovspec.kernels.BACKEND`` to see which core got picked up.
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
                "shakhovspec._kernels",
                ["src/shakhovspec/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - build-environment dependent
    print(f"shakhovspec: skipping Cython extension ({exc}); pure-python core will be used")

setup(ext_modules=ext_modules)
