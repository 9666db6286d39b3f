# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

__version__ = "0.1.0"
