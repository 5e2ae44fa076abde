"""Q-value planning over LLM dialogue strategies."""

from ._core import (
    DialplanError,
    HashEncoder,
    QHead,
    catalog,
    estimate_prior_beam,
    parse_topk_list,
    project,
    simulate,
    softmax,
    tasks,
    verdict_options,
)

__all__ = [
    "DialplanError",
    "HashEncoder",
    "QHead",
    "catalog",
    "estimate_prior_beam",
    "parse_topk_list",
    "project",
    "simulate",
    "softmax",
    "tasks",
    "verdict_options",
]
