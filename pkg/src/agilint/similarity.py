"""Title similarity used by the duplicate-story detector.

Normalization: lowercase, punctuation to spaces, whitespace tokenize.
Similarity is Jaccard over the resulting token sets. The fixture
generator uses the same functions to guarantee its background stories
stay below the duplicate threshold.
"""

from __future__ import annotations

import re

_PUNCTUATION = re.compile(r"[^0-9a-z]+")


def title_tokens(title: str) -> frozenset[str]:
    return frozenset(t for t in _PUNCTUATION.split(title.lower()) if t)


def jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 1.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0
