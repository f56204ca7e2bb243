"""URL extraction from email bodies and caption/target mismatch detection."""

from __future__ import annotations

import ipaddress
import re
from html.parser import HTMLParser
from importlib import resources
from urllib.parse import urlparse

from phishcode.records import UrlRef

_URL_RE = re.compile(r"(?i)\b(?:https?://|www\.)[^\s<>\"'`]+")
_BARE_DOMAIN_RE = re.compile(
    r"^(?:https?://)?(?:www\.)?[a-z0-9-]+(?:\.[a-z0-9-]+)*\.[a-z]{2,}(?::\d+)?(?:/\S*)?$",
    re.IGNORECASE,
)
_ANCHOR_HINT_RE = re.compile(r"<a[\s>]", re.IGNORECASE)
_TRAILING_PUNCT = ".,;:!?)\"'>]}"


def _load_multipart_suffixes() -> frozenset[str]:
    text = (
        resources.files("phishcode").joinpath("data/multipart_suffixes.txt").read_text("utf-8")
    )
    out = set()
    for line in text.splitlines():
        line = line.strip().lower()
        if line and not line.startswith("#"):
            out.add(line)
    return frozenset(out)


MULTIPART_SUFFIXES = _load_multipart_suffixes()


def registrable_domain(host: str) -> str:
    """Organization-level domain: last two labels, or three when the
    two-label tail is a known multi-part suffix (co.uk, web.app, ...).

    An approximation; a full public-suffix database is deliberately not
    bundled.
    """
    host = host.strip().strip(".").lower()
    if not host:
        return ""
    try:
        ipaddress.ip_address(host)
        return host
    except ValueError:
        pass
    labels = host.split(".")
    if len(labels) <= 2:
        return host
    if ".".join(labels[-2:]) in MULTIPART_SUFFIXES:
        return ".".join(labels[-3:])
    return ".".join(labels[-2:])


def _host_of(url: str) -> str:
    url = url.strip()
    if not url:
        return ""
    try:
        parsed = urlparse(url)
    except ValueError:
        return ""
    if parsed.scheme and parsed.scheme not in ("http", "https"):
        return ""
    if not parsed.netloc:
        try:
            parsed = urlparse("http://" + url)
        except ValueError:
            return ""
    host = parsed.netloc.rsplit("@", 1)[-1]
    if host.startswith("["):  # bracketed IPv6 literal
        host = host[1 : host.index("]")] if "]" in host else host[1:]
    else:
        host = host.split(":")[0]
    return host.lower()


def _visible_domain(text: str) -> str | None:
    """Registrable domain of a link caption, when the caption itself reads
    as a URL; None otherwise."""
    text = text.strip()
    if not text or " " in text:
        return None
    if not (_URL_RE.fullmatch(text) or _BARE_DOMAIN_RE.fullmatch(text)):
        return None
    host = _host_of(text)
    return registrable_domain(host) if host else None


def _make_ref(visible_text: str, href: str) -> UrlRef:
    host = _host_of(href)
    href_domain = registrable_domain(host) if host else ""
    vis_dom = _visible_domain(visible_text)
    return UrlRef(
        visible_text=visible_text,
        href=href,
        href_domain=href_domain,
        mismatch=vis_dom is not None and vis_dom != href_domain,
        parse_failed=not href_domain,
    )


class _AnchorCollector(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.anchors: list[tuple[str, str]] = []
        self.plain_chunks: list[str] = []
        self._href: str | None = None
        self._text: list[str] = []

    def handle_starttag(self, tag, attrs):
        if tag == "a":
            self._href = dict(attrs).get("href") or ""
            self._text = []

    def handle_endtag(self, tag):
        if tag == "a" and self._href is not None:
            self.anchors.append((" ".join("".join(self._text).split()), self._href))
            self._href = None
            self._text = []

    def handle_data(self, data):
        if self._href is not None:
            self._text.append(data)
        else:
            self.plain_chunks.append(data)


def _strip_trailing_punct(url: str) -> str:
    while url and url[-1] in _TRAILING_PUNCT:
        url = url[:-1]
    return url


def _bare_urls(text: str) -> list[str]:
    return [_strip_trailing_punct(m.group(0)) for m in _URL_RE.finditer(text)]


def extract_urls(content: str) -> list[UrlRef]:
    """Pull every link out of an HTML or plain-text body.

    Anchor elements yield (caption, target) pairs; bare URLs outside anchors
    yield refs whose caption is the URL itself.
    """
    if not content:
        return []
    refs: list[UrlRef] = []
    if _ANCHOR_HINT_RE.search(content):
        collector = _AnchorCollector()
        try:
            collector.feed(content)
            collector.close()
        except Exception:
            return [_make_ref(u, u) for u in _bare_urls(content)]
        for visible, href in collector.anchors:
            refs.append(_make_ref(visible, href))
        for url in _bare_urls("".join(collector.plain_chunks)):
            refs.append(_make_ref(url, url))
    else:
        refs = [_make_ref(u, u) for u in _bare_urls(content)]
    return refs
