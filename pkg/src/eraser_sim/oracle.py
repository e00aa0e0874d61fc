"""Reference click statistics that do not touch the Monte Carlo path.

``enumeration_oracle`` walks every routing sequence of up to ``kmax`` photons
over the five outcomes (four detectors plus loss).  ``thinning_probability``
is the closed form from Poisson splitting: detectors see independent Poisson
photon numbers, so a set of detectors all clicks with probability
prod(1 - exp(-mu p_d)).
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product

import numpy as np
from scipy.stats import poisson


@lru_cache(maxsize=None)
def _sequences(k: int) -> tuple[np.ndarray, np.ndarray]:
    seqs = np.array(list(product(range(5), repeat=k)), dtype=np.int64).reshape(5**k, k)
    counts = np.stack([(seqs == o).sum(axis=1) for o in range(5)], axis=1)
    masks = np.zeros(len(seqs), dtype=np.int64)
    for d in range(4):
        masks |= (counts[:, d] > 0).astype(np.int64) << d
    return counts, masks


def enumeration_oracle(probs, mu: float, kmax: int = 6) -> tuple[np.ndarray, float]:
    """Click-pattern probabilities, shape ``(..., 16)``, and the Poisson mass
    beyond ``kmax`` that the enumeration leaves out."""
    probs = np.asarray(probs, dtype=float)
    full = np.concatenate([probs, 1.0 - probs.sum(axis=-1, keepdims=True)], axis=-1)
    out = np.zeros(probs.shape[:-1] + (16,))
    for k in range(kmax + 1):
        counts, masks = _sequences(k)
        seq_p = np.prod(full[..., None, :] ** counts, axis=-1)  # (..., 5**k)
        onehot = np.zeros((len(masks), 16))
        onehot[np.arange(len(masks)), masks] = 1.0
        out += poisson.pmf(k, mu) * (seq_p @ onehot)
    return out, float(poisson.sf(kmax, mu))


def subset_probability(pattern_probs: np.ndarray, subset) -> np.ndarray:
    want = sum(1 << (d - 1) for d in subset)
    sel = [m for m in range(16) if m & want == want]
    return pattern_probs[..., sel].sum(axis=-1)


def thinning_probability(probs, mu: float, subset) -> np.ndarray:
    probs = np.asarray(probs, dtype=float)
    return np.prod(-np.expm1(-mu * probs[..., [d - 1 for d in subset]]), axis=-1)
