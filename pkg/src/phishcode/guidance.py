"""Tailored reader guidance generated from a coded email.

Wording lives in external template files so deployments can re-word or
localize without code changes; this module only selects, fills, and ranks.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from phishcode.codebook import CodedEmail
from phishcode.lexicons import Lexicons
from phishcode.records import EmailRecord

log = logging.getLogger(__name__)

VERDICTS = ("informational", "caution", "high-risk")

_SECTOR_SLUGS = {
    "financial": "financial",
    "email": "email",
    "document share": "document_share",
    "logistics": "logistics",
    "shopping": "shopping",
    "service provider": "service_provider",
    "security": "security",
    "government": "government",
    "unknown": "unknown",
}
_ACTION_SLUGS = {
    "click": "click",
    "download": "download",
    "reply/email": "reply_email",
    "call": "call",
    "other": "other",
    "none": "none",
}


@dataclass(frozen=True)
class MismatchFinding:
    company: str
    observed_domain: str
    location: str  # "sender" or "url"
    expected_domain: str


@dataclass(frozen=True)
class GuidanceResponse:
    email_id: str
    scam_category_explanation: str
    action_advice: dict[str, str]
    mismatch_findings: tuple[MismatchFinding, ...]
    manipulation_flags: tuple[str, ...]
    pressure_note: str
    overall_verdict: str
    evidence: tuple[tuple[str, str], ...]

    def to_json(self) -> str:
        payload = {
            "email_id": self.email_id,
            "scam_category_explanation": self.scam_category_explanation,
            "action_advice": dict(sorted(self.action_advice.items())),
            "mismatch_findings": [
                {
                    "company": f.company,
                    "observed_domain": f.observed_domain,
                    "location": f.location,
                    "expected_domain": f.expected_domain,
                }
                for f in self.mismatch_findings
            ],
            "manipulation_flags": list(self.manipulation_flags),
            "pressure_note": self.pressure_note,
            "overall_verdict": self.overall_verdict,
            "evidence": [list(e) for e in self.evidence],
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self) -> str:
        lines = [f"Verdict: {self.overall_verdict}", ""]
        lines.append(self.scam_category_explanation.strip())
        for action in sorted(self.action_advice):
            lines.append("")
            lines.append(self.action_advice[action].strip())
        for f in self.mismatch_findings:
            lines.append("")
            lines.append(
                f"Claimed {f.company}, but the {f.location} domain is "
                f"{f.observed_domain} (expected {f.expected_domain})."
            )
        if self.pressure_note:
            lines.append("")
            lines.append(self.pressure_note.strip())
        return "\n".join(lines) + "\n"


class TemplateSet:
    """Named text snippets with str.format slots, loaded from a directory
    (packaged defaults fill any gaps)."""

    def __init__(self, base: str | Path | None = None):
        self._base = Path(base) if base is not None else None

    def get(self, name: str, fallback: str) -> str:
        text = self._read(name)
        if text is not None:
            return text
        fb = self._read(fallback)
        if fb is not None:
            log.warning("template %s missing; using %s", name, fallback)
            return fb
        log.warning("templates %s and %s missing; using built-in stub", name, fallback)
        return "Treat this message with caution and verify it independently."

    def _read(self, name: str) -> Optional[str]:
        if self._base is not None:
            candidate = self._base / f"{name}.txt"
            if candidate.is_file():
                return candidate.read_text("utf-8").strip()
        try:
            return (
                resources.files("phishcode")
                .joinpath(f"data/templates/{name}.txt")
                .read_text("utf-8")
                .strip()
            )
        except FileNotFoundError:
            return None


def detect_mismatch(
    coded: CodedEmail, record: EmailRecord, lex: Lexicons
) -> tuple[MismatchFinding, ...]:
    """Domains that contradict the claimed organization: one finding per
    (company, observed domain) whose location does not match the company's
    registered legitimate domain. Sentinels ("none", "organization") make
    no claim, so they yield nothing."""
    findings: list[MismatchFinding] = []
    for company in coded.company_names:
        if company in ("none", "organization"):
            continue
        legit = lex.gazetteer_domain(company)
        if not legit:
            continue
        if record.sender_domain and record.sender_domain != legit:
            findings.append(
                MismatchFinding(
                    company=company,
                    observed_domain=record.sender_domain,
                    location="sender",
                    expected_domain=legit,
                )
            )
        seen: set[str] = set()
        for url in record.urls:
            if url.href_domain and url.href_domain != legit and url.href_domain not in seen:
                seen.add(url.href_domain)
                findings.append(
                    MismatchFinding(
                        company=company,
                        observed_domain=url.href_domain,
                        location="url",
                        expected_domain=legit,
                    )
                )
    return tuple(findings)


def _verdict(mismatches: Sequence[MismatchFinding], flags: Sequence[str], sector: str) -> str:
    if mismatches or ("threat" in flags and "urgency" in flags):
        return "high-risk"
    if flags or sector == "unknown":
        return "caution"
    return "informational"


def generate_guidance(
    coded: CodedEmail,
    record: EmailRecord,
    templates: TemplateSet | None = None,
    lex: Lexicons | None = None,
) -> GuidanceResponse:
    """Deterministic advice assembled from the coded fields: a sector
    explanation, one advice block per requested action, any domain
    mismatches, and a pressure-tactics note when threat or urgency codes
    are present."""
    from phishcode.lexicons import load_lexicons

    templates = templates or TemplateSet()
    lex = lex or load_lexicons()

    sector_slug = _SECTOR_SLUGS.get(coded.sector, "default")
    explanation = templates.get(f"sector_{sector_slug}", "sector_default")

    advice: dict[str, str] = {}
    for action in sorted(coded.actions_generic):
        slug = _ACTION_SLUGS.get(action, "default")
        advice[action] = templates.get(f"action_{slug}", "action_default")

    mismatches = detect_mismatch(coded, record, lex)

    flags = tuple(
        flag
        for flag, present in (("threat", coded.threat == "threat"), ("urgency", coded.urgency == "urgent"))
        if present
    )
    verdict = _verdict(mismatches, flags, coded.sector)

    pressure_note = ""
    if flags:
        pressure_note = templates.get("pressure", "pressure").format(flags=" and ".join(flags))

    evidence: list[tuple[str, str]] = [
        ("sector", coded.sector),
        ("company", ", ".join(coded.company_names)),
        ("actions", ", ".join(sorted(coded.actions_generic))),
        ("threat", coded.threat),
        ("urgency", coded.urgency),
    ]
    for f in mismatches:
        evidence.append((f"{f.location}_domain", f.observed_domain))

    return GuidanceResponse(
        email_id=coded.email_id,
        scam_category_explanation=explanation,
        action_advice=advice,
        mismatch_findings=mismatches,
        manipulation_flags=flags,
        pressure_note=pressure_note,
        overall_verdict=verdict,
        evidence=tuple(evidence),
    )
