import numpy
from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; symdom.kernels falls back to numpy
    ext_modules = []
else:
    ext_modules = cythonize(
        [Extension("symdom._ckernels", ["src/symdom/_ckernels.pyx"],
                   include_dirs=[numpy.get_include()])],
        language_level=3,
    )

setup(ext_modules=ext_modules)
