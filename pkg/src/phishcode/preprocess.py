"""Corpus filtering (empty/non-English bodies) and frequency-based sampling."""

from __future__ import annotations

import logging
import random
import re
from importlib import resources

from phishcode.records import EmailRecord, SamplingPlan

log = logging.getLogger(__name__)

_WORD_RE = re.compile(r"[a-zA-Z]+")

# heuristic thresholds: texts shorter than MIN_TOKENS are never dropped for
# language, longer ones must contain at least MIN_STOPWORD_RATIO common
# English words
MIN_TOKENS = 10
MIN_STOPWORD_RATIO = 0.02


def _load_stopwords() -> frozenset[str]:
    text = resources.files("phishcode").joinpath("data/stopwords_en.txt").read_text("utf-8")
    return frozenset(
        line.strip().lower()
        for line in text.splitlines()
        if line.strip() and not line.startswith("#")
    )


STOPWORDS = _load_stopwords()


def english_stopword_ratio(text: str) -> tuple[float, int]:
    """(fraction of tokens that are common English words, token count)."""
    tokens = _WORD_RE.findall(text.lower())
    if not tokens:
        return 0.0, 0
    hits = sum(1 for t in tokens if t in STOPWORDS)
    return hits / len(tokens), len(tokens)


def looks_english(text: str) -> bool:
    ratio, n_tokens = english_stopword_ratio(text)
    if n_tokens < MIN_TOKENS:
        return True
    return ratio >= MIN_STOPWORD_RATIO


def preprocess(
    records: list[EmailRecord], language_filter: bool = True
) -> tuple[list[EmailRecord], list[tuple[EmailRecord, str]]]:
    """Partition records into (kept, dropped-with-reason).

    Reasons: "empty" for a blank body, "non-english" for bodies failing the
    stopword-ratio heuristic.
    """
    kept: list[EmailRecord] = []
    dropped: list[tuple[EmailRecord, str]] = []
    for rec in records:
        if not rec.body_text.strip():
            dropped.append((rec, "empty"))
        elif language_filter and not looks_english(rec.body_text):
            dropped.append((rec, "non-english"))
        else:
            kept.append(rec)
    return kept, dropped


def _max_frequency_window(counts: dict[int, int], window_months: int) -> int:
    """Start month (1-12) of the contiguous window with the highest total;
    the earliest window wins ties."""
    best_start, best_total = 1, -1
    for start in range(1, 14 - window_months):
        total = sum(counts.get(m, 0) for m in range(start, start + window_months))
        if total > best_total:
            best_start, best_total = start, total
    return best_start


def sample_by_frequency(records: list[EmailRecord], plan: SamplingPlan) -> list[EmailRecord]:
    """Uniform sample (without replacement, seeded) from the densest
    `window_months`-long stretch of `plan.year`. Returns ids in sorted order;
    the same seed always returns the same records."""
    dated = [r for r in records if r.date is not None and r.date.year == plan.year]
    if not dated:
        log.warning("no records dated %d; nothing to sample", plan.year)
        return []
    counts: dict[int, int] = {}
    for rec in dated:
        counts[rec.date.month] = counts.get(rec.date.month, 0) + 1
    start = _max_frequency_window(counts, plan.window_months)
    window = sorted(
        (r for r in dated if start <= r.date.month < start + plan.window_months),
        key=lambda r: r.id,
    )
    rng = random.Random(plan.seed)
    k = min(plan.sample_size, len(window))
    return sorted(rng.sample(window, k), key=lambda r: r.id)
