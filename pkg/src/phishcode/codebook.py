"""The annotation schema: eight codes per email, their vocabularies,
validation, and CSV/JSONL serialization."""

from __future__ import annotations

import csv
import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO, Iterable, Iterator

CANONICAL_SECTORS = (
    "financial",
    "email",
    "document share",
    "logistics",
    "shopping",
    "service provider",
    "security",
    "government",
    "unknown",
)
SALUTATIONS = ("name", "email", "generic", "none")
THREAT_VALUES = ("threat", "none")
URGENCY_VALUES = ("urgent", "none")
ACTIONS = ("click", "download", "reply/email", "call", "other", "none")

_ARTICLES = ("a", "an", "the", "to")
_JOIN_PUNCT_RE = re.compile(r"[-'’`]+")
_PUNCT_RE = re.compile(r"[^\w\s]+")


@dataclass(frozen=True)
class CodebookSchema:
    """Closed vocabularies for the coded fields. Sectors may be extended
    (append-only); the canonical nine are always present."""

    sectors: tuple[str, ...] = CANONICAL_SECTORS
    salutations: tuple[str, ...] = SALUTATIONS
    threat_values: tuple[str, ...] = THREAT_VALUES
    urgency_values: tuple[str, ...] = URGENCY_VALUES
    actions: tuple[str, ...] = ACTIONS

    def __post_init__(self):
        for canonical in CANONICAL_SECTORS:
            if canonical not in self.sectors:
                raise ValueError(f"canonical sector missing: {canonical}")
        for label in self.sectors:
            if label != label.lower():
                raise ValueError(f"sector labels must be lowercase: {label!r}")

    def with_sectors(self, *extra: str) -> "CodebookSchema":
        added = tuple(s.lower() for s in extra if s.lower() not in self.sectors)
        return replace(self, sectors=self.sectors + added)


@dataclass(frozen=True)
class CodedEmail:
    """One email's eight codes. Multi-valued fields keep their coded order;
    in-vivo phrases are stored normalized, raw variants kept for display."""

    email_id: str
    company_names: tuple[str, ...]
    sector: str
    salutation: str
    threat: str
    urgency: str
    actions_generic: frozenset[str]
    action_specific: tuple[str, ...]
    main_topic: str
    indirect_flag: bool = False
    main_topic_raw: str = ""
    action_specific_raw: tuple[str, ...] = ()


def normalize_invivo(phrase: str) -> str:
    """Canonical form for in-vivo phrases: casefolded, punctuation stripped
    (hyphens/apostrophes joined), whitespace collapsed, leading articles
    (a, an, the, to) removed."""
    s = phrase.casefold()
    s = _JOIN_PUNCT_RE.sub("", s)
    s = _PUNCT_RE.sub(" ", s)
    tokens = s.split()
    while tokens and tokens[0] in _ARTICLES:
        tokens.pop(0)
    return " ".join(tokens)


def validate_coded(coded: CodedEmail, schema: CodebookSchema) -> list[str]:
    """All invariant violations as strings; empty means valid. Total: bad
    types become violations, not exceptions."""
    violations: list[str] = []

    def check(condition: bool, message: str) -> None:
        if not condition:
            violations.append(message)

    try:
        companies = tuple(coded.company_names)
        check(bool(companies), "company_names must not be empty")
        if "none" in companies:
            check(len(companies) == 1, "company sentinel 'none' must be the sole entry")
        check(coded.sector in schema.sectors, f"unknown sector: {coded.sector!r}")
        check(coded.salutation in schema.salutations, f"unknown salutation: {coded.salutation!r}")
        check(coded.threat in schema.threat_values, f"unknown threat value: {coded.threat!r}")
        check(coded.urgency in schema.urgency_values, f"unknown urgency value: {coded.urgency!r}")
        actions = set(coded.actions_generic)
        check(bool(actions), "actions_generic must not be empty")
        unknown_actions = actions - set(schema.actions)
        check(not unknown_actions, f"unknown actions: {sorted(unknown_actions)}")
        if "none" in actions:
            check(len(actions) == 1, "action 'none' must not co-occur with other actions")
        for phrase in coded.action_specific:
            check(
                normalize_invivo(phrase) == phrase,
                f"action_specific phrase not normalized: {phrase!r}",
            )
        check(
            normalize_invivo(coded.main_topic) == coded.main_topic,
            f"main_topic not normalized: {coded.main_topic!r}",
        )
    except Exception as exc:  # malformed field types are data errors too
        violations.append(f"malformed record: {exc}")
    return violations


EXPORT_COLUMNS = (
    "email_id",
    "company_names",
    "sector",
    "salutation",
    "threat",
    "urgency",
    "actions_generic",
    "action_specific",
    "main_topic",
    "indirect_flag",
)


def _join_multi(values: Iterable[str]) -> str:
    return ", ".join(values)


def _split_multi(value: str) -> tuple[str, ...]:
    return tuple(v.strip() for v in value.split(",") if v.strip())


def coded_to_row(coded: CodedEmail) -> dict[str, str]:
    return {
        "email_id": coded.email_id,
        "company_names": _join_multi(coded.company_names),
        "sector": coded.sector,
        "salutation": coded.salutation,
        "threat": coded.threat,
        "urgency": coded.urgency,
        "actions_generic": _join_multi(sorted(coded.actions_generic)),
        "action_specific": _join_multi(coded.action_specific),
        "main_topic": coded.main_topic,
        "indirect_flag": "true" if coded.indirect_flag else "false",
    }


def coded_from_row(row: dict[str, str]) -> CodedEmail:
    return CodedEmail(
        email_id=row["email_id"],
        company_names=_split_multi(row.get("company_names", "")) or ("none",),
        sector=row.get("sector", "unknown"),
        salutation=row.get("salutation", "none"),
        threat=row.get("threat", "none"),
        urgency=row.get("urgency", "none"),
        actions_generic=frozenset(_split_multi(row.get("actions_generic", ""))) or frozenset({"none"}),
        action_specific=_split_multi(row.get("action_specific", "")),
        main_topic=row.get("main_topic", ""),
        indirect_flag=str(row.get("indirect_flag", "")).strip().lower() in ("true", "1", "yes"),
    )


def coded_to_dict(coded: CodedEmail) -> dict:
    d: dict = dict(coded_to_row(coded))
    d["company_names"] = list(coded.company_names)
    d["actions_generic"] = sorted(coded.actions_generic)
    d["action_specific"] = list(coded.action_specific)
    d["indirect_flag"] = coded.indirect_flag
    if coded.main_topic_raw:
        d["main_topic_raw"] = coded.main_topic_raw
    if coded.action_specific_raw:
        d["action_specific_raw"] = list(coded.action_specific_raw)
    return d


def coded_from_dict(d: dict) -> CodedEmail:
    return CodedEmail(
        email_id=d["email_id"],
        company_names=tuple(d.get("company_names", ())) or ("none",),
        sector=d.get("sector", "unknown"),
        salutation=d.get("salutation", "none"),
        threat=d.get("threat", "none"),
        urgency=d.get("urgency", "none"),
        actions_generic=frozenset(d.get("actions_generic", ())) or frozenset({"none"}),
        action_specific=tuple(d.get("action_specific", ())),
        main_topic=d.get("main_topic", ""),
        indirect_flag=bool(d.get("indirect_flag", False)),
        main_topic_raw=d.get("main_topic_raw", ""),
        action_specific_raw=tuple(d.get("action_specific_raw", ())),
    )


def write_coded_csv(coded: Iterable[CodedEmail], fp: IO[str]) -> None:
    writer = csv.DictWriter(fp, fieldnames=EXPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for c in coded:
        writer.writerow(coded_to_row(c))


def read_coded_csv(path: str | Path) -> Iterator[CodedEmail]:
    with open(path, newline="", encoding="utf-8") as fp:
        for row in csv.DictReader(fp):
            yield coded_from_row(row)


def write_coded_jsonl(coded: Iterable[CodedEmail], fp: IO[str]) -> None:
    for c in coded:
        fp.write(json.dumps(coded_to_dict(c), sort_keys=True, ensure_ascii=False))
        fp.write("\n")


def read_coded_jsonl(path: str | Path) -> Iterator[CodedEmail]:
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if line:
                yield coded_from_dict(json.loads(line))
