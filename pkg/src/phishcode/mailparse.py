"""Archive framing and MIME decoding: bytes in, EmailRecords out."""

from __future__ import annotations

import logging
import re
from datetime import timezone
from email import policy
from email.message import Message
from email.parser import BytesParser
from email.utils import parseaddr, parsedate_to_datetime

from phishcode.htmltext import html_to_text
from phishcode.records import ID_PATTERN, EmailRecord, RawEmail
from phishcode.transport import extract_transport
from phishcode.urls import extract_urls

log = logging.getLogger(__name__)

_UNSTUFF_RE = re.compile(rb"^>(>*From )", re.MULTILINE)
_TAGLIKE_RE = re.compile(r"</?[a-zA-Z][^>\n]*>")


class MailboxFormatError(ValueError):
    """Archive framing is broken; carries the byte offset of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


def parse_mailbox(archive: bytes, fmt: str = "mbox", origin_path: str = "<bytes>") -> list[RawEmail]:
    """Split an archive into raw messages, preserving order of appearance.

    `fmt` is "mbox" (RFC 4155 "From " framing) or "eml" (one message).
    Empty message slots are skipped with a warning rather than aborting the
    whole archive.
    """
    if fmt == "eml":
        if not archive.strip():
            raise MailboxFormatError("empty eml input", 0)
        return [RawEmail(source_bytes=archive, origin_path=origin_path, origin_index=0)]
    if fmt != "mbox":
        raise ValueError(f"unknown mailbox format: {fmt!r}")

    if not archive.strip():
        return []

    offset = 0
    starts: list[int] = []
    for line in archive.splitlines(keepends=True):
        if line.startswith(b"From "):
            starts.append(offset)
        elif not starts and line.strip():
            raise MailboxFormatError("mbox content before first 'From ' separator", offset)
        offset += len(line)

    out: list[RawEmail] = []
    for i, start in enumerate(starts):
        end = starts[i + 1] if i + 1 < len(starts) else len(archive)
        chunk = archive[start:end]
        # drop the "From " envelope line itself
        nl = chunk.find(b"\n")
        body = chunk[nl + 1 :] if nl >= 0 else b""
        body = _UNSTUFF_RE.sub(rb"\1", body)
        if not body.strip():
            log.warning("%s: skipping empty message slot %d", origin_path, i)
            continue
        out.append(RawEmail(source_bytes=body, origin_path=origin_path, origin_index=i))
    return out


def _header(msg: Message, name: str) -> str:
    try:
        value = msg.get(name)
    except Exception:
        return ""
    if value is None:
        return ""
    try:
        return str(value)
    except Exception:
        return ""


def _decode_part(part: Message, warnings: list[str]) -> str:
    try:
        payload = part.get_payload(decode=True)
    except Exception:
        payload = None
    if payload is None:
        raw = part.get_payload()
        return raw if isinstance(raw, str) else ""
    charset = part.get_content_charset() or "utf-8"
    try:
        return payload.decode(charset, errors="replace")
    except LookupError:
        warnings.append(f"unknown-charset:{charset}")
        return payload.decode("utf-8", errors="replace")


def _walk_bodies(msg: Message, warnings: list[str]) -> tuple[str | None, str | None, bool]:
    text_part = None
    html_part = None
    has_attachment = False
    for part in msg.walk():
        if part.is_multipart():
            continue
        try:
            disposition = part.get_content_disposition()
        except Exception:
            disposition = None
        filename = part.get_filename()
        if disposition == "attachment" or (filename and disposition != "inline"):
            has_attachment = True
            continue
        ctype = part.get_content_type()
        if ctype == "text/plain" and text_part is None:
            text_part = _decode_part(part, warnings)
        elif ctype == "text/html" and html_part is None:
            html_part = _decode_part(part, warnings)
    return text_part, html_part, has_attachment


def to_record(raw: RawEmail, id: str) -> EmailRecord:
    """Decode one raw message into the user-visible record.

    Only the header fields a mail client shows are kept. The body is the
    text part when present, else the stripped HTML part.
    """
    if not ID_PATTERN.match(id):
        raise ValueError(f"id must look like YYYY_NNN, got {id!r}")
    warnings: list[str] = []
    msg = BytesParser(policy=policy.default).parsebytes(raw.source_bytes)

    from_raw = _header(msg, "From")
    sender_display, sender_address = "", ""
    if from_raw:
        sender_display, sender_address = parseaddr(from_raw)
        if not sender_address and not sender_display:
            sender_display = from_raw.strip()
    else:
        warnings.append("missing-from")
    sender_domain = ""
    if "@" in sender_address:
        sender_domain = sender_address.rsplit("@", 1)[1].strip().lower()

    date = None
    date_raw = _header(msg, "Date")
    if date_raw:
        try:
            date = parsedate_to_datetime(date_raw)
            if date.tzinfo is None:
                date = date.replace(tzinfo=timezone.utc)
            date = date.astimezone(timezone.utc)
        except (TypeError, ValueError):
            warnings.append("bad-date")

    text_part, html_part, has_attachment = _walk_bodies(msg, warnings)
    if text_part is not None and text_part.strip():
        body_text = text_part.replace("\r\n", "\n").replace("\r", "\n")
        if _TAGLIKE_RE.search(body_text):
            body_text = html_to_text(body_text)
    elif html_part is not None:
        body_text = html_to_text(html_part)
    else:
        body_text = ""

    urls = extract_urls(html_part) if html_part else extract_urls(body_text)

    return EmailRecord(
        id=id,
        date=date,
        sender_display=sender_display.strip(),
        sender_address=sender_address.strip(),
        sender_domain=sender_domain,
        subject=_header(msg, "Subject").strip(),
        body_text=body_text,
        body_html=html_part,
        urls=tuple(urls),
        has_attachment=has_attachment,
        transport=extract_transport(msg),
        warnings=tuple(warnings),
    )


def assign_ids(raws: list[RawEmail]) -> list[EmailRecord]:
    """Decode raw messages and hand out YYYY_NNN ids: year of the message
    date, index by order of appearance within that year, zero-padded to 3
    digits (more when a year holds 1000+ messages)."""
    decoded = [(raw, _peek_year(raw)) for raw in raws]
    per_year: dict[int, int] = {}
    for _, year in decoded:
        per_year[year] = per_year.get(year, 0) + 1
    widths = {year: max(3, len(str(count))) for year, count in per_year.items()}
    counters: dict[int, int] = {}
    out = []
    for raw, year in decoded:
        counters[year] = counters.get(year, 0) + 1
        rec_id = f"{year:04d}_{counters[year]:0{widths[year]}d}"
        out.append(to_record(raw, rec_id))
    return out


def _peek_year(raw: RawEmail) -> int:
    msg = BytesParser(policy=policy.default).parsebytes(raw.source_bytes)
    date_raw = _header(msg, "Date")
    if date_raw:
        try:
            dt = parsedate_to_datetime(date_raw)
            if dt is not None:
                return dt.year
        except (TypeError, ValueError):
            pass
    return 0
