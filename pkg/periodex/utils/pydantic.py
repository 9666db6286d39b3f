# Copyright (c) Meta Platforms, Inc. and affiliates.
# pyre-strict

import re
from contextlib import contextmanager
from typing import Any, Generator

from pydantic import ValidationError

from ..exceptions import ScenarioConfigError

_PYDANTIC_URL_SUFFIX = re.compile(
    r"\s+For further information visit https:\/\/errors\.pydantic\.dev\/[0-9\.]+\/v\/\w+"
)


def format_error_location(loc: tuple[int | str, ...]) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def describe_validation_error(error: ValidationError) -> list[str]:
    """
    One line per offending field, in the form `path.to.field: message`.
    """
    return [
        f"{format_error_location(item['loc'])}: {item['msg']}" for item in error.errors()
    ]


@contextmanager
def sanitize_pydantic_validation_error(
    source: str | None = None,
) -> Generator[None, Any, Any]:
    """
    Pydantic 2+ adds an unhelpful URL suffix to every message. We strip it and
    re-raise as ScenarioConfigError so callers only deal with our hierarchy, and
    keep the per-field paths around for diagnostics.
    """

    try:
        yield
    except ValidationError as e:
        errors = [_PYDANTIC_URL_SUFFIX.sub("", line) for line in describe_validation_error(e)]
        prefix = f"invalid scenario config ({source})" if source else "invalid scenario config"
        raise ScenarioConfigError(
            prefix + ":\n" + "\n".join(f"  {line}" for line in errors), errors
        ) from None
