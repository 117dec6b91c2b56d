""" Install file for the weak Galerkin plate solver """
# pylint: disable=line-too-long
from os.path import dirname, join

from setuptools import setup

README_FILE = join(dirname(__file__), "README.md")
with open(README_FILE, "r", encoding="utf-8") as handle:
    LONG_DESCRIPTION = handle.read()

if __name__ == "__main__":
    setup(
        name="wg_plate",
        packages=["wg_plate"],
        version="0.1.0",
        description="Weak Galerkin solver, residual error estimator and adaptive refinement for singularly perturbed clamped plates",
        long_description=LONG_DESCRIPTION,
        long_description_content_type="text/markdown",
        keywords=["weak galerkin", "finite element", "biharmonic", "a posteriori", "adaptive"],
        install_requires=["numpy>=1.22", "scipy>=1.12", "matplotlib>=3.5"],
        entry_points={"console_scripts": ["wg-plate=wg_plate.cli:main"]},
    )
