"""Best-effort HTML to visible-text conversion for email bodies."""

from __future__ import annotations

import re
from html.parser import HTMLParser

_BLOCK_TAGS = frozenset(
    "p div br li tr table ul ol h1 h2 h3 h4 h5 h6 blockquote hr "
    "section article header footer form pre dd dt".split()
)
_SKIP_TAGS = frozenset({"script", "style", "head", "title", "template"})
_HWS = re.compile(r"[ \t\r\f\v ]+")


class _TextExtractor(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.chunks: list[str] = []
        self._skip_depth = 0

    def handle_starttag(self, tag, attrs):
        if tag in _SKIP_TAGS:
            self._skip_depth += 1
        elif tag in _BLOCK_TAGS:
            self.chunks.append("\n")

    def handle_startendtag(self, tag, attrs):
        if tag in _BLOCK_TAGS:
            self.chunks.append("\n")

    def handle_endtag(self, tag):
        if tag in _SKIP_TAGS and self._skip_depth:
            self._skip_depth -= 1
        elif tag in _BLOCK_TAGS:
            self.chunks.append("\n")

    def handle_data(self, data):
        if not self._skip_depth:
            self.chunks.append(data)


def _strip_once(text: str) -> str:
    parser = _TextExtractor()
    try:
        parser.feed(text)
        parser.close()
    except Exception:
        # malformed beyond what HTMLParser tolerates: fall back to a crude
        # tag regex so the function stays total
        stripped = re.sub(r"<[^>]*>", " ", text)
        return _normalize_ws(stripped)
    return _normalize_ws("".join(parser.chunks))


def _normalize_ws(text: str) -> str:
    lines = [_HWS.sub(" ", ln).strip() for ln in text.split("\n")]
    return "\n".join(ln for ln in lines if ln)


def html_to_text(html: str) -> str:
    """Strip markup, drop script/style content, decode entities, and collapse
    whitespace. Applied to its own output it is a no-op: the transform is
    re-run until it stops changing, so entity-encoded markup cannot survive
    one call and reappear as markup in the next.
    """
    text = html
    # every changing pass shrinks (len, odd-whitespace count), so the
    # fixpoint is reached well within this bound
    for _ in range(2 * len(html) + 3):
        stripped = _strip_once(text)
        if stripped == text:
            return stripped
        text = stripped
    return text
