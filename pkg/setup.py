#!/usr/bin/env python

from setuptools import find_packages, setup

setup(
    name="mrci",
    version="0.1.0",
    description="Maximal rule concentration of risky choice data",
    author="",
    author_email="",
    url="",
    python_requires=">=3.10",
    install_requires=[
        "numpy",
        "scipy",
        "pandas",
        "joblib",
        "hydra-core",
        "hydra-colorlog",
        "omegaconf",
        "rich",
        "rootutils",
    ],
    packages=find_packages(include=["src", "src.*"]),
    # use this to customize global commands available in the terminal after installing the package
    entry_points={
        "console_scripts": [
            "mrci = src.mrci:main",
        ]
    },
)
