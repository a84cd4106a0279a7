from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

extensions = [
    Extension(
        "ocmeta._kernels",
        ["src/ocmeta/_kernels.pyx"],
        # -ffp-contract=off: no FMA fusion, the compiled kernels must round
        # exactly like the numpy fallback (one multiply, one add).
        # -fno-builtin-cos/sin: stop the compiler from fusing the adjacent
        # cos/sin calls into glibc's sincos, which can differ from the
        # separate calls by 1 ulp and would break bit-parity with the
        # fallback's math.cos/math.sin.
        extra_compile_args=[
            "-O3",
            "-ffp-contract=off",
            "-fno-builtin-cos",
            "-fno-builtin-sin",
            "-fno-builtin-sincos",
        ],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3"},
    )
    if cythonize is not None
    else [],
)
