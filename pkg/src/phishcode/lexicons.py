"""Editable phrase lists driving the automatic coder.

Every list ships as a plain-text data file (one phrase per line, "#"
comments) so deployments can tune vocabulary without touching code. The
gazetteer is tab-separated: name, sector, optional legitimate domain; file
order is the recognizability ranking used when several names match.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping, Optional

from phishcode.codebook import CANONICAL_SECTORS

_ACTION_FILES = {
    "click": "click.txt",
    "download": "download.txt",
    "reply/email": "reply_email.txt",
    "call": "call.txt",
    "other": "other.txt",
}
_SECTOR_FILES = {
    "financial": "financial.txt",
    "email": "email.txt",
    "document share": "document_share.txt",
    "logistics": "logistics.txt",
    "shopping": "shopping.txt",
    "service provider": "service_provider.txt",
    "security": "security.txt",
    "government": "government.txt",
}


@dataclass(frozen=True)
class GazetteerEntry:
    name: str
    sector: str
    legit_domain: Optional[str] = None


@dataclass(frozen=True)
class Lexicons:
    urgency_terms: tuple[str, ...]
    threat_patterns: tuple[str, ...]
    org_gazetteer: tuple[GazetteerEntry, ...]
    sector_keywords: Mapping[str, tuple[str, ...]]
    action_verbs: Mapping[str, tuple[str, ...]]
    internal_org_terms: tuple[str, ...]
    cta_verbs: tuple[str, ...]

    def gazetteer_sector(self, name: str) -> Optional[str]:
        for entry in self.org_gazetteer:
            if entry.name == name:
                return entry.sector
        return None

    def gazetteer_domain(self, name: str) -> Optional[str]:
        for entry in self.org_gazetteer:
            if entry.name == name:
                return entry.legit_domain
        return None


def _read_lines(text: str) -> tuple[str, ...]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            out.append(line.casefold())
    return tuple(out)


def _read_file(base: Optional[Path], relative: str) -> str:
    """Prefer `base/relative` when a custom directory is given, falling back
    to the packaged copy for any file the directory does not override."""
    if base is not None:
        candidate = base / relative
        if candidate.is_file():
            return candidate.read_text("utf-8")
    return resources.files("phishcode").joinpath(f"data/{relative}").read_text("utf-8")


def _parse_gazetteer(text: str) -> tuple[GazetteerEntry, ...]:
    entries = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("\t")]
        if len(parts) < 2:
            raise ValueError(f"gazetteer line {lineno}: expected name<TAB>sector")
        name, sector = parts[0].casefold(), parts[1].casefold()
        if sector not in CANONICAL_SECTORS:
            raise ValueError(f"gazetteer line {lineno}: unknown sector {sector!r}")
        domain = parts[2].casefold() if len(parts) > 2 and parts[2] else None
        entries.append(GazetteerEntry(name=name, sector=sector, legit_domain=domain))
    return tuple(entries)


def load_lexicons(
    base: str | Path | None = None, gazetteer: str | Path | None = None
) -> Lexicons:
    """Load the packaged lexicons, with any file optionally overridden by a
    same-named file under `base`; `gazetteer` overrides the gazetteer file
    on its own."""
    base_path = Path(base) if base is not None else None
    if gazetteer is not None:
        gazetteer_text = Path(gazetteer).read_text("utf-8")
    else:
        gazetteer_text = _read_file(base_path, "gazetteer.tsv")
    return Lexicons(
        urgency_terms=_read_lines(_read_file(base_path, "lexicons/urgency.txt")),
        threat_patterns=_read_lines(_read_file(base_path, "lexicons/threat.txt")),
        org_gazetteer=_parse_gazetteer(gazetteer_text),
        sector_keywords={
            sector: _read_lines(_read_file(base_path, f"lexicons/sectors/{fname}"))
            for sector, fname in _SECTOR_FILES.items()
        },
        action_verbs={
            label: _read_lines(_read_file(base_path, f"lexicons/actions/{fname}"))
            for label, fname in _ACTION_FILES.items()
        },
        internal_org_terms=_read_lines(_read_file(base_path, "lexicons/internal_org.txt")),
        cta_verbs=_read_lines(_read_file(base_path, "lexicons/cta_verbs.txt")),
    )
