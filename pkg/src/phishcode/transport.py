"""Transport metadata from message headers: origin IP, hop count, DKIM."""

from __future__ import annotations

import ipaddress
import re
from email.message import Message

from phishcode.records import TransportMeta

_IPV4_RE = re.compile(r"(?<![\d.])(\d{1,3}(?:\.\d{1,3}){3})(?![\d.])")
_IPV6_RE = re.compile(r"(?<![0-9A-Fa-f:])([0-9A-Fa-f]{0,4}(?::[0-9A-Fa-f]{0,4}){2,7})(?![0-9A-Fa-f:])")


def _first_ip_in(header_value: str) -> str | None:
    candidates: list[tuple[int, str]] = []
    for m in _IPV4_RE.finditer(header_value):
        candidates.append((m.start(), m.group(1)))
    for m in _IPV6_RE.finditer(header_value):
        candidates.append((m.start(), m.group(1)))
    for _, raw in sorted(candidates):
        try:
            ipaddress.ip_address(raw)
        except ValueError:
            continue
        return raw
    return None


def extract_transport(msg: Message) -> TransportMeta:
    """Origin hints a responder can use without trusting any single header.

    The bottom-most Received header is the hop closest to the true sender,
    so its first IP literal is taken as the origin address.
    """
    received = [str(v) for v in (msg.get_all("Received") or [])]
    first_ip = None
    if received:
        first_ip = _first_ip_in(received[-1])
    return TransportMeta(
        first_ip=first_ip,
        received_count=len(received),
        dkim_present=msg.get("DKIM-Signature") is not None,
    )
