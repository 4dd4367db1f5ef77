"""Deterministic random-stream management.

Every Monte Carlo replica owns a counter-based Philox stream derived from
(master seed, domain tag, replica index), so any replica can be regenerated
in isolation and worker pools cannot perturb results. A kernel or sampler
that receives a Generator owns it: the stream position after a call is
unspecified (vectorized backends may draw in blocks), so never reuse a
generator across tasks — make a fresh stream per (domain, replica) instead.
"""

from __future__ import annotations

import numpy as np

# Domain tags separate the independent uses of the master seed. Values are
# part of the determinism contract: changing them changes every output.
DOMAINS = {
    "walk": 1,
    "limit": 2,
    "oracle": 3,
    "stats": 4,
    "scratch": 7,
}


def stream(master_seed: int, domain: str | int, replica: int = 0) -> np.random.Generator:
    """Return the Philox generator for one (domain, replica) cell."""
    tag = DOMAINS[domain] if isinstance(domain, str) else int(domain)
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(tag, int(replica)))
    return np.random.Generator(np.random.Philox(ss))
