"""Built-in domains and their scripted stand-in policies.

Registered domain ids: sr3, sr4, sr5 (search and rescue), rware2, rware4,
rware19 (warehouse), lbf2, lbf4, lbf9 (level-based foraging).  ``simulate``
streams trajectory samples episode by episode; identical (domain, seed,
episodes, max_steps) always yields an identical stream.
"""

from __future__ import annotations

from typing import Callable, Iterator

from ..domain import DomainDefinition
from ..errors import UnknownDomainError
from .base import TraceSample, read_trace, write_trace
from .foraging import lbf_domain, run_lbf_episodes
from .search_rescue import run_sr_episodes, sr_domain
from .warehouse import run_rware_episodes, rware_domain

DEFAULT_MAX_STEPS = 50

_REGISTRY: dict[str, tuple[Callable[[], DomainDefinition], Callable]] = {
    "sr3": (lambda: sr_domain(3), lambda e, m, s: run_sr_episodes(3, e, m, s)),
    "sr4": (lambda: sr_domain(4), lambda e, m, s: run_sr_episodes(4, e, m, s)),
    "sr5": (lambda: sr_domain(5), lambda e, m, s: run_sr_episodes(5, e, m, s)),
    "rware2": (lambda: rware_domain(2), lambda e, m, s: run_rware_episodes(2, e, m, s)),
    "rware4": (lambda: rware_domain(4), lambda e, m, s: run_rware_episodes(4, e, m, s)),
    "rware19": (lambda: rware_domain(19), lambda e, m, s: run_rware_episodes(19, e, m, s)),
    "lbf2": (lambda: lbf_domain(2), lambda e, m, s: run_lbf_episodes(2, e, m, s)),
    "lbf4": (lambda: lbf_domain(4), lambda e, m, s: run_lbf_episodes(4, e, m, s)),
    "lbf9": (lambda: lbf_domain(9), lambda e, m, s: run_lbf_episodes(9, e, m, s)),
}


def domain_ids() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def get_domain(domain_id: str) -> DomainDefinition:
    try:
        builder, _ = _REGISTRY[domain_id]
    except KeyError:
        raise UnknownDomainError(
            f"unknown domain {domain_id!r}; available: {', '.join(domain_ids())}"
        ) from None
    return builder()


def simulate(domain_id: str, *, episodes: int, max_steps: int = DEFAULT_MAX_STEPS,
             seed: int = 42) -> Iterator[TraceSample]:
    """Stream of TraceSamples from the domain's scripted policy."""
    try:
        _, runner = _REGISTRY[domain_id]
    except KeyError:
        raise UnknownDomainError(
            f"unknown domain {domain_id!r}; available: {', '.join(domain_ids())}"
        ) from None
    return runner(episodes, max_steps, seed)


__all__ = [
    "DEFAULT_MAX_STEPS",
    "TraceSample",
    "domain_ids",
    "get_domain",
    "read_trace",
    "simulate",
    "sr_domain",
    "rware_domain",
    "lbf_domain",
    "write_trace",
]
