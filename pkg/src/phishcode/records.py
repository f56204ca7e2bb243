"""Core record types for parsed emails plus their JSON Lines round trip."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import IO, Iterable, Iterator, Optional

ID_PATTERN = re.compile(r"^\d{4}_\d{3,}$")


@dataclass(frozen=True)
class RawEmail:
    """One undecoded message as pulled out of an archive."""

    source_bytes: bytes
    origin_path: str
    origin_index: int

    def __post_init__(self):
        if not self.source_bytes:
            raise ValueError("RawEmail.source_bytes must be non-empty")


@dataclass(frozen=True)
class UrlRef:
    """A link as the reader sees it: caption, target, and whether they clash."""

    visible_text: str
    href: str
    href_domain: str
    mismatch: bool
    parse_failed: bool = False


@dataclass(frozen=True)
class TransportMeta:
    first_ip: Optional[str]
    received_count: int
    dkim_present: bool


@dataclass(frozen=True)
class EmailRecord:
    """The user-visible slice of one email plus light transport metadata."""

    id: str
    date: Optional[datetime]
    sender_display: str
    sender_address: str
    sender_domain: str
    subject: str
    body_text: str
    body_html: Optional[str]
    urls: tuple[UrlRef, ...]
    has_attachment: bool
    transport: TransportMeta
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class SamplingPlan:
    year: int
    window_months: int
    sample_size: int
    seed: int

    def __post_init__(self):
        if not 1 <= self.window_months <= 12:
            raise ValueError("window_months must be in 1..12")
        if self.sample_size < 1:
            raise ValueError("sample_size must be >= 1")


def _date_to_json(dt: Optional[datetime]) -> Optional[str]:
    if dt is None:
        return None
    return dt.astimezone(timezone.utc).isoformat()


def _date_from_json(s: Optional[str]) -> Optional[datetime]:
    if not s:
        return None
    return datetime.fromisoformat(s).astimezone(timezone.utc)


def record_to_dict(rec: EmailRecord) -> dict:
    return {
        "id": rec.id,
        "date": _date_to_json(rec.date),
        "sender_display": rec.sender_display,
        "sender_address": rec.sender_address,
        "sender_domain": rec.sender_domain,
        "subject": rec.subject,
        "body_text": rec.body_text,
        "body_html": rec.body_html,
        "urls": [
            {
                "visible_text": u.visible_text,
                "href": u.href,
                "href_domain": u.href_domain,
                "mismatch": u.mismatch,
                "parse_failed": u.parse_failed,
            }
            for u in rec.urls
        ],
        "has_attachment": rec.has_attachment,
        "transport": {
            "first_ip": rec.transport.first_ip,
            "received_count": rec.transport.received_count,
            "dkim_present": rec.transport.dkim_present,
        },
        "warnings": list(rec.warnings),
    }


def record_from_dict(d: dict) -> EmailRecord:
    return EmailRecord(
        id=d["id"],
        date=_date_from_json(d.get("date")),
        sender_display=d.get("sender_display", ""),
        sender_address=d.get("sender_address", ""),
        sender_domain=d.get("sender_domain", ""),
        subject=d.get("subject", ""),
        body_text=d.get("body_text", ""),
        body_html=d.get("body_html"),
        urls=tuple(
            UrlRef(
                visible_text=u.get("visible_text", ""),
                href=u.get("href", ""),
                href_domain=u.get("href_domain", ""),
                mismatch=bool(u.get("mismatch", False)),
                parse_failed=bool(u.get("parse_failed", False)),
            )
            for u in d.get("urls", [])
        ),
        has_attachment=bool(d.get("has_attachment", False)),
        transport=TransportMeta(
            first_ip=d.get("transport", {}).get("first_ip"),
            received_count=int(d.get("transport", {}).get("received_count", 0)),
            dkim_present=bool(d.get("transport", {}).get("dkim_present", False)),
        ),
        warnings=tuple(d.get("warnings", ())),
    )


def write_records_jsonl(records: Iterable[EmailRecord], fp: IO[str]) -> None:
    for rec in records:
        fp.write(json.dumps(record_to_dict(rec), sort_keys=True, ensure_ascii=False))
        fp.write("\n")


def read_records_jsonl(path: str | Path) -> Iterator[EmailRecord]:
    with open(path, encoding="utf-8") as fp:
        for line in fp:
            line = line.strip()
            if line:
                yield record_from_dict(json.loads(line))
