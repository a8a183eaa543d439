"""Deterministic derivation of independent random streams.

Every stochastic routine in the package draws from a generator obtained with
:func:`spawn_rng`.  A stream is addressed by an integer path rooted at the
master seed, e.g. ``(master, point_index, ROLE_NOISE, window_index)``; numpy's
``SeedSequence`` hashes the full tuple, so distinct paths give statistically
independent streams and the result of a computation never depends on how the
work was scheduled across workers.
"""

from __future__ import annotations

import numpy as np

# role tags keep stream paths collision-free across subsystems
ROLE_TRAJECTORY = 1
ROLE_NOISE = 2
ROLE_SATURATION = 3


def spawn_rng(*path: int) -> np.random.Generator:
    """Generator for the stream addressed by the integer tuple ``path``."""
    if not path:
        raise ValueError("path must contain at least the master seed")
    return np.random.default_rng(np.random.SeedSequence(tuple(int(p) for p in path)))
