from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "entpow._kernels",
        ["src/entpow/_kernels.pyx"],
        extra_compile_args=["-O3"],
        # the package falls back to the numpy kernel when this is missing
        optional=True,
    )
]

setup(
    ext_modules=cythonize(extensions, compiler_directives={"language_level": "3"})
    if cythonize
    else [],
)
