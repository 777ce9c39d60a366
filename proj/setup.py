from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

CORE_SOURCES = [
    "src/core.cpp",
    "src/csv.cpp",
    "src/eval.cpp",
    "src/fitting.cpp",
    "src/hetero.cpp",
    "src/lookup.cpp",
    "src/models_games.cpp",
    "src/models_risk.cpp",
    "src/models_seq.cpp",
    "src/pipeline.cpp",
    "src/synth.cpp",
    "src/trees.cpp",
    "src/bindings.cpp",
]

setup(
    ext_modules=[
        Pybind11Extension(
            "completeness._core",
            CORE_SOURCES,
            include_dirs=["include", "vendor"],
            cxx_std=20,
        )
    ],
    cmdclass={"build_ext": build_ext},
)
