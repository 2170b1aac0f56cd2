"""CMake-driven build of the bilat extension.

The project is a CMake tree; this shim configures and builds the `_core`
pybind11 module with CMake and drops it into the python package, following
the standard pybind11 cmake-project pattern.
"""

import os
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name: str, sourcedir: str = "") -> None:
        super().__init__(name, sources=[])
        self.sourcedir = os.fspath(Path(sourcedir).resolve())


class CMakeBuild(build_ext):
    def build_extension(self, ext: CMakeExtension) -> None:
        ext_path = Path.cwd() / self.get_ext_fullpath(ext.name)
        build_dir = Path(self.build_temp) / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        cfg = "Debug" if self.debug else "Release"
        cmake_args = [
            f"-DCMAKE_BUILD_TYPE={cfg}",
            f"-DPython3_EXECUTABLE={sys.executable}",
            "-DSKBUILD=ON",  # skips the test tree inside pip builds
        ]
        subprocess.run(
            ["cmake", ext.sourcedir, *cmake_args], cwd=build_dir, check=True
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "-j"],
            cwd=build_dir,
            check=True,
        )

        built = list((build_dir / "python" / "bilat").glob("_core*"))
        if not built:
            raise RuntimeError("CMake did not produce the _core module")
        ext_path.parent.mkdir(parents=True, exist_ok=True)
        self.copy_file(built[0], ext_path)


setup(
    ext_modules=[CMakeExtension("bilat._core")],
    cmdclass={"build_ext": CMakeBuild},
    packages=["bilat"],
    package_dir={"bilat": "python/bilat"},
)
