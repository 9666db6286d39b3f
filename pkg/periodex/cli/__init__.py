# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict
