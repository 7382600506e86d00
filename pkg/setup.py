"""Build script for the optional compiled kernel extension.

The package works without the extension (a numpy/scipy fallback is selected
at import time), so a failed compile degrades gracefully instead of blocking
the install.  Set OSDNP_NO_EXT=1 to skip the extension build entirely.
"""

import os

from setuptools import setup


def _extensions():
    if os.environ.get("OSDNP_NO_EXT") == "1":
        return []
    try:
        import numpy as np
        from Cython.Build import cythonize
        from setuptools import Extension

        ext = Extension(
            "osdnp._core._kernels",
            ["src/osdnp/_core/_kernels.pyx"],
            include_dirs=[np.get_include()],
            extra_compile_args=["-O3"],
            define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
        )
        return cythonize([ext], compiler_directives={"language_level": "3"})
    except Exception as exc:  # pragma: no cover - build-env dependent
        print("kernel extension skipped: %s" % exc)
        return []


setup(ext_modules=_extensions())
