from setuptools import Extension, setup

# The compiled evaluator is an optional accelerator; the package falls back
# to the pure-Python twin when the extension is unavailable.
try:
    from Cython.Build import cythonize

    extensions = cythonize(
        [
            Extension(
                "gliq.smt._fasteval",
                ["src/gliq/smt/_fasteval.pyx"],
                extra_compile_args=["-O2"],
            )
        ],
        compiler_directives={"language_level": "3"},
    )
except Exception:
    extensions = []

setup(ext_modules=extensions)
