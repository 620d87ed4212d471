# Copyright 2026 The MMFedGraph Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""
Text-overlap metrics over token sequences.

Tokenization is lowercase plus whitespace split. BLEU has no smoothing,
so any n-gram order without a match scores 0. CIDEr keeps the customary
factor of 10.
"""

import math
from collections import Counter
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import EmptyCorpusError, InvalidMetricArgument

__all__ = (
    "CIDER_SCALE",
    "tokenize",
    "ngrams",
    "bleu",
    "lcs_length",
    "rouge_l",
    "cider",
)

CIDER_SCALE = 10.0

Tokens = Sequence[str]
NGram = Tuple[str, ...]


def tokenize(text: str) -> List[str]:
    return text.lower().split()


def ngrams(tokens: Tokens, n: int) -> "Counter[NGram]":
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: Tokens, reference: Tokens, max_n: int = 4) -> float:
    """
    Single-reference BLEU with uniform weights and clipped n-gram counts.

    Returns 0 for an empty candidate or when some order up to ``max_n``
    has no clipped match.
    """
    if max_n < 1:
        raise InvalidMetricArgument(f"max_n has to be at least 1, got {max_n}")
    if not candidate:
        return 0.0
    log_precision = 0.0
    for n in range(1, max_n + 1):
        cand = ngrams(candidate, n)
        total = sum(cand.values())
        if not total:
            return 0.0
        ref = ngrams(reference, n)
        clipped = sum(min(count, ref[gram]) for gram, count in cand.items())
        if not clipped:
            return 0.0
        log_precision += math.log(clipped / total) / max_n
    c, r = len(candidate), len(reference)
    brevity = 1.0 if c > r else math.exp(1.0 - r / c)
    return brevity * math.exp(log_precision)


def lcs_length(a: Tokens, b: Tokens) -> int:
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b):
            if token == other:
                current.append(previous[j] + 1)
            else:
                current.append(max(previous[j + 1], current[j]))
        previous = current
    return previous[-1]


def rouge_l(candidate: Tokens, reference: Tokens, beta: float = 1.2) -> float:
    """LCS F-measure ``(1 + b^2) R P / (R + b^2 P)``."""
    if not candidate or not reference:
        return 0.0
    lcs = lcs_length(candidate, reference)
    if not lcs:
        return 0.0
    precision = lcs / len(candidate)
    recall = lcs / len(reference)
    return (1 + beta**2) * recall * precision / (recall + beta**2 * precision)


def _tfidf(
    tokens: Tokens, n: int, document_frequency: "Counter[NGram]", corpus_size: int
) -> Dict[NGram, float]:
    counts = ngrams(tokens, n)
    total = sum(counts.values())
    return {
        gram: (count / total)
        * math.log(max(1, corpus_size) / max(1, document_frequency[gram]))
        for gram, count in counts.items()
    }


def _cosine(a: Dict[NGram, float], b: Dict[NGram, float]) -> float:
    dot = sum(value * b.get(gram, 0.0) for gram, value in a.items())
    norm_a = math.sqrt(sum(value * value for value in a.values()))
    norm_b = math.sqrt(sum(value * value for value in b.values()))
    if norm_a == 0 or norm_b == 0:
        return 0.0
    return dot / (norm_a * norm_b)


def cider(
    candidate: Tokens,
    references: Sequence[Tokens],
    corpus: Optional[Sequence[Tokens]] = None,
    max_n: int = 4,
) -> float:
    """
    TF-IDF weighted n-gram similarity.

    For every order ``n`` the cosine between the candidate's TF-IDF vector
    and each reference's is averaged over references; the orders are then
    averaged uniformly and scaled by `CIDER_SCALE`. Document frequencies
    come from ``corpus``, which defaults to ``references``.

    Raises
    ------
    EmptyCorpusError
        When there is no reference or the corpus is empty.
    """
    if not references:
        raise EmptyCorpusError("CIDEr needs at least one reference")
    documents = references if corpus is None else corpus
    if not documents:
        raise EmptyCorpusError("CIDEr needs a non-empty corpus")
    score = 0.0
    for n in range(1, max_n + 1):
        frequency: "Counter[NGram]" = Counter()
        for document in documents:
            frequency.update(set(ngrams(document, n)))
        cand = _tfidf(candidate, n, frequency, len(documents))
        score += sum(
            _cosine(cand, _tfidf(ref, n, frequency, len(documents)))
            for ref in references
        ) / len(references)
    return CIDER_SCALE * score / max_n
