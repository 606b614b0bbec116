"""Seeded random generators for edges and field data.

The edge sampler draws the level exponent k uniformly from [-D, D+2] and
gives the tail iid uniform coefficients on the index window [-2, k)
(so a bounded polynomial part plus the full fractional part); orientation
is a fair coin unless pinned.  Everything is driven by a caller-supplied
random.Random, so identical (config, seed) pairs reproduce identical runs.
"""

from __future__ import annotations

import random
from typing import Callable

from .fq import Fq, Poly
from .tree import TreeEdge, make_edge


def sample_edge(
    rng: random.Random, field: Fq, depth: int, orient: str = "any"
) -> TreeEdge:
    k = rng.randint(-depth, depth + 2)
    tail = {i: rng.randrange(field.q) for i in range(-2, k)}
    if orient == "pos":
        positive = True
    elif orient == "neg":
        positive = False
    else:
        positive = rng.random() < 0.5
    return make_edge(field, k, tail, positive)


def sample_until(
    rng: random.Random,
    field: Fq,
    depth: int,
    want: int,
    accept: Callable[[TreeEdge], bool],
    orient: str = "any",
    max_attempts: int | None = None,
) -> list[TreeEdge]:
    """Collect `want` edges passing `accept` (e.g. in-depth evaluability)."""
    out: list[TreeEdge] = []
    attempts = 0
    cap = max_attempts if max_attempts is not None else 80 * want + 400
    while len(out) < want:
        attempts += 1
        if attempts > cap:
            raise RuntimeError(
                f"edge sampling accepted only {len(out)}/{want} in {cap} draws"
            )
        e = sample_edge(rng, field, depth, orient)
        if accept(e):
            out.append(e)
    return out


def sample_poly(rng: random.Random, field: Fq, max_deg: int, nonzero: bool = False) -> Poly:
    while True:
        coeffs = [rng.randrange(field.q) for _ in range(max_deg + 1)]
        p = Poly(field, coeffs)
        if nonzero and p.is_zero():
            continue
        return p
