#!/usr/bin/env python3
# Copyright (c) Meta Platforms, Inc. and affiliates.
from setuptools import find_packages, setup

setup(
    name="periodex",
    version="0.1.0",
    packages=find_packages(include=["periodex", "periodex.*"]),
    package_data={"periodex.scenarios.builtin": ["*.yaml"]},
)
