"""Corpus-level label distributions and co-occurrence counts."""

from __future__ import annotations

import csv
import json
from collections import Counter
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal
from typing import IO, Sequence

from phishcode.codebook import CodedEmail
from phishcode.preprocess import STOPWORDS

SINGLE_VALUED_CODES = ("sector", "salutation", "threat", "urgency")
MULTI_VALUED_CODES = ("company", "action")
TOP_K = 10

_MEMBERSHIP = {
    "sector": lambda c: (c.sector,),
    "salutation": lambda c: (c.salutation,),
    "threat": lambda c: (c.threat,),
    "urgency": lambda c: (c.urgency,),
    "company": lambda c: tuple(c.company_names),
    "action": lambda c: tuple(sorted(c.actions_generic)),
}


def _pct(count: int, denominator: int) -> float:
    # rounded half-up to two decimals, matching how percentages are usually
    # quoted in writeups
    value = Decimal(count) * 100 / Decimal(denominator)
    return float(value.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


@dataclass(frozen=True)
class DistributionReport:
    denominator: int
    per_code: dict[str, dict[str, tuple[int, float]]]
    top_phrases: dict[str, tuple[tuple[str, int], ...]]
    top_tokens: dict[str, tuple[tuple[str, int], ...]]

    def to_json(self) -> str:
        payload = {
            "denominator": self.denominator,
            "per_code": {
                code: {
                    label: {"count": count, "percent": pct}
                    for label, (count, pct) in labels.items()
                }
                for code, labels in self.per_code.items()
            },
            "top_phrases": {k: [list(p) for p in v] for k, v in self.top_phrases.items()},
            "top_tokens": {k: [list(p) for p in v] for k, v in self.top_tokens.items()},
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text_table(self) -> str:
        lines = [f"n = {self.denominator}"]
        for code, labels in self.per_code.items():
            lines.append("")
            lines.append(code)
            width = max(len(label) for label in labels)
            for label, (count, pct) in labels.items():
                lines.append(f"  {label.ljust(width)}  {str(count).rjust(5)}  {pct:6.2f}%")
        for name, phrases in self.top_phrases.items():
            lines.append("")
            lines.append(f"top {name} phrases")
            for phrase, count in phrases:
                lines.append(f"  {phrase!r} ({count})")
        for name, tokens in self.top_tokens.items():
            lines.append("")
            lines.append(f"top {name} terms")
            for token, count in tokens:
                lines.append(f"  {token!r} ({count})")
        return "\n".join(lines)

    def write_csv(self, fp: IO[str]) -> None:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(["code", "label", "count", "percent"])
        for code, labels in self.per_code.items():
            for label, (count, pct) in labels.items():
                writer.writerow([code, label, count, f"{pct:.2f}"])


def _top_counts(counter: Counter, k: int) -> tuple[tuple[str, int], ...]:
    # count-descending, alphabetical within ties, for stable output
    return tuple(sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))[:k])


def distribution_report(coded: Sequence[CodedEmail], top_k: int = TOP_K) -> DistributionReport:
    """Counts and percentages per label per code. Single-valued codes sum
    to the email count; multi-valued ones may not."""
    if not coded:
        raise ValueError("no coded emails to report on")
    n = len(coded)
    per_code: dict[str, dict[str, tuple[int, float]]] = {}
    for code in SINGLE_VALUED_CODES + MULTI_VALUED_CODES:
        counter: Counter = Counter()
        for c in coded:
            counter.update(_MEMBERSHIP[code](c))
        per_code[code] = {
            label: (count, _pct(count, n))
            for label, count in sorted(counter.items(), key=lambda kv: (-kv[1], kv[0]))
        }

    top_phrases: dict[str, tuple[tuple[str, int], ...]] = {}
    top_tokens: dict[str, tuple[tuple[str, int], ...]] = {}
    for name, getter in (
        ("action_specific", lambda c: c.action_specific),
        ("main_topic", lambda c: (c.main_topic,) if c.main_topic else ()),
    ):
        phrase_counter: Counter = Counter()
        token_counter: Counter = Counter()
        for c in coded:
            for phrase in getter(c):
                phrase_counter[phrase] += 1
                for token in phrase.lower().split():
                    if token not in STOPWORDS:
                        token_counter[token] += 1
        top_phrases[name] = _top_counts(phrase_counter, top_k)
        top_tokens[name] = _top_counts(token_counter, top_k)

    return DistributionReport(
        denominator=n, per_code=per_code, top_phrases=top_phrases, top_tokens=top_tokens
    )


@dataclass(frozen=True)
class CooccurrenceResult:
    count: int
    frac_of_a: float
    frac_of_b: float
    marginal_a: int
    marginal_b: int


def cooccurrence_report(
    coded: Sequence[CodedEmail],
    code_a: str,
    code_b: str,
    value_a: str,
    value_b: str,
) -> CooccurrenceResult:
    """How often two code values land on the same email, relative to each
    value's own frequency."""
    if code_a not in _MEMBERSHIP:
        raise ValueError(f"unknown code: {code_a!r}")
    if code_b not in _MEMBERSHIP:
        raise ValueError(f"unknown code: {code_b!r}")
    both = 0
    marginal_a = 0
    marginal_b = 0
    for c in coded:
        has_a = value_a in _MEMBERSHIP[code_a](c)
        has_b = value_b in _MEMBERSHIP[code_b](c)
        marginal_a += has_a
        marginal_b += has_b
        both += has_a and has_b
    return CooccurrenceResult(
        count=both,
        frac_of_a=both / marginal_a if marginal_a else 0.0,
        frac_of_b=both / marginal_b if marginal_b else 0.0,
        marginal_a=marginal_a,
        marginal_b=marginal_b,
    )
