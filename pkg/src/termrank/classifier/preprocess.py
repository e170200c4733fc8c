"""Statement text to token pipeline.

Lowercase, replace punctuation with spaces, tokenize on whitespace,
drop stopwords, stem. The stopword filter runs on the surface form,
before stemming. Digit-only tokens ("300" from "$300") survive; the
currency and punctuation characters themselves never do.
"""

from __future__ import annotations

import re

from ._stopwords import STOPWORDS, STOPWORDS_VERSION
from .stemmer import STEMMER_VERSION, stem

__all__ = ["preprocess", "PIPELINE_VERSION"]

PIPELINE_VERSION = f"lower-punct-stop{STOPWORDS_VERSION}-{STEMMER_VERSION}"

_NON_ALNUM = re.compile(r"[^a-z0-9]+")


def preprocess(text: str) -> list[str]:
    cleaned = _NON_ALNUM.sub(" ", text.lower())
    return [stem(t) for t in cleaned.split() if t not in STOPWORDS]
