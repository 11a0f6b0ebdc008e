"""CMake-backed build of the _core extension (pybind11).

Mirrors the top-level CMake build so `pip install .` and
`pip install -e . --no-build-isolation` both produce a working package.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        out = Path(self.get_ext_fullpath(ext.name)).resolve().parent
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)
        source = Path(__file__).resolve().parent
        cfg = "Debug" if self.debug else "Release"
        args = [
            "cmake",
            "-S", str(source),
            "-B", str(build_dir),
            f"-DCMAKE_BUILD_TYPE={cfg}",
            f"-DPYTHON_EXECUTABLE={sys.executable}",
            "-DLATWAVE_PYTHON=ON",
        ]
        if os.environ.get("CMAKE_GENERATOR") is None:
            args += ["-G", "Ninja"]
        subprocess.run(args, check=True)
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "latwave_pyext"],
            check=True,
        )
        built = build_dir / "python" / "latwave"
        out.mkdir(parents=True, exist_ok=True)
        for so in built.glob("_core*.so"):
            self.copy_file(str(so), str(out / so.name))


setup(
    ext_modules=[CMakeExtension("latwave._core")],
    cmdclass={"build_ext": CMakeBuild},
)
