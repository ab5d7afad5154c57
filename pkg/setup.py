#!/usr/bin/env python
"""
wrenchkit packaging.
"""
import pathlib
from setuptools import setup, find_packages

NAME = "wrenchkit"
DESCRIPTION = "Task attainability analysis for planar pneumatic soft arms"
LICENSE = "MIT"
BASE_DIR = pathlib.Path(__file__).parent.resolve()
LONG_DESCRIPTION = (BASE_DIR / "README.md").read_text(encoding="utf-8")
VERSION = (BASE_DIR / "VERSION").read_text(encoding="utf-8").strip()
REQUIREMENTS = (BASE_DIR / "requirements.txt").read_text(encoding="utf-8").split()



setup(
    name=NAME,
    version=VERSION,
    license=LICENSE,
    description=DESCRIPTION,
    long_description=LONG_DESCRIPTION,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["examples", "examples.*"]),
    python_requires=">=3.8",
    classifiers=[
        "Development Status :: 4 - Beta",
        "Programming Language :: Python :: 3 :: Only",
        "License :: OSI Approved :: MIT License",
        "Topic :: Scientific/Engineering :: Physics",
        "Operating System :: OS Independent",
        ],
    keywords=[
        "soft robotics pneumatic actuator wrench convex hull attainability",
        ],
    install_requires=REQUIREMENTS,
    package_data={"wrenchkit.datasets": ["*.json", "*.csv"]},
    include_package_data=True,
    entry_points={"console_scripts": ["wrenchkit=wrenchkit.cli:main"]},
    )
