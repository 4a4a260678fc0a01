from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    ext_modules = []
else:
    ext_modules = cythonize(
        [
            Extension(
                "delaycost._kernel",
                sources=["src/delaycost/_kernel.pyx"],
                extra_compile_args=["-O3", "-std=c++17"],
                language="c++",
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
