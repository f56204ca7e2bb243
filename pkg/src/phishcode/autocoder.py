"""Heuristic coder: derive the eight codes from a parsed email.

Deterministic by construction; every decision traces to a phrase list in
the lexicons or to a fixed rule here, so two runs over the same corpus
always agree.
"""

from __future__ import annotations

import re
from functools import lru_cache
from typing import Iterable, Sequence

from phishcode.codebook import CodebookSchema, CodedEmail, normalize_invivo
from phishcode.lexicons import Lexicons
from phishcode.preprocess import STOPWORDS
from phishcode.records import EmailRecord, UrlRef

_GREETING_RE = re.compile(
    r"^\s*(dear|attention|attn|hello|hi|greetings|good\s+(?:morning|afternoon|evening|day))\b[\s,:;!-]*(.*)$",
    re.IGNORECASE,
)
_GENERIC_ADDRESSEES = frozenset(
    {
        "user",
        "users",
        "customer",
        "customers",
        "member",
        "members",
        "client",
        "clients",
        "sir",
        "madam",
        "sirs",
        "friend",
        "beneficiary",
        "subscriber",
        "account holder",
        "accountholder",
        "valued customer",
        "valued member",
        "recipient",
        "team",
        "colleague",
        "colleagues",
        "all",
        "everyone",
        "staff",
        "employee",
        "winner",
        "taxpayer",
        "applicant",
        "cardholder",
    }
)
_DURATION_RE = re.compile(
    r"\b(?:expires?|expired|expiring|expiry|within|before|in)\b[^.!?\n]{0,24}?"
    r"\b\d+\s*(?:hour|hr|day|minute|min|week|month)s?\b",
    re.IGNORECASE,
)
_SUBJECT_PREFIX_RE = re.compile(r"^\s*(?:(?:re|fw|fwd)\s*:\s*)+", re.IGNORECASE)
# a dot only ends a sentence before whitespace, so domains ("usaa.com") and
# decimals survive clause extraction
_SENTENCE_END_RE = re.compile(r"[.!?](?=\s|$)|\n")
_GENERIC_SUBJECTS = frozenset(
    {
        "notification",
        "important",
        "alert",
        "attention",
        "reminder",
        "notice",
        "update",
        "urgent",
        "hello",
        "hi",
        "fyi",
        "info",
        "warning",
        "account",
    }
)


@lru_cache(maxsize=4096)
def _phrase_re(phrase: str) -> re.Pattern:
    # whole-word phrase match, tolerant of whitespace runs
    body = re.escape(phrase).replace(r"\ ", r"\s+")
    return re.compile(rf"(?<!\w){body}(?!\w)", re.IGNORECASE)


def _any_match(phrases: Iterable[str], text: str) -> bool:
    return any(_phrase_re(p).search(text) for p in phrases)


def code_salutation(body_text: str, recipient_name: str = "", recipient_address: str = "") -> str:
    """How the email addresses the reader, judged from the opening body
    lines only (headers deliberately ignored)."""
    lines = [ln.strip() for ln in body_text.splitlines() if ln.strip()][:2]
    for line in lines:
        m = _GREETING_RE.match(line)
        if not m:
            continue
        addressee = m.group(2).strip()
        # the full address wins over the bare name it contains
        if recipient_address and recipient_address.lower() in line.lower():
            return "email"
        if recipient_name and _phrase_re(recipient_name).search(line):
            return "name"
        trimmed = addressee.strip(" ,.:;!-").casefold()
        if trimmed in _GENERIC_ADDRESSEES or any(
            term in _GENERIC_ADDRESSEES for term in (trimmed.split()[:1] or [""])
        ):
            return "generic"
        return "none"
    return "none"


def code_threat(subject: str, body_text: str, lex: Lexicons) -> str:
    text = f"{subject}\n{body_text}"
    return "threat" if _any_match(lex.threat_patterns, text) else "none"


def code_urgency(subject: str, body_text: str, lex: Lexicons) -> str:
    text = f"{subject}\n{body_text}"
    if _any_match(lex.urgency_terms, text) or _DURATION_RE.search(text):
        return "urgent"
    return "none"


def _is_cta_caption(text: str, cta_verbs: Sequence[str]) -> bool:
    tokens = normalize_invivo(text).split()
    return bool(tokens) and len(tokens) <= 6 and tokens[0] in cta_verbs


def code_action_generic(
    body_text: str,
    urls: Sequence[UrlRef],
    has_attachment: bool,
    lex: Lexicons,
) -> frozenset[str]:
    """Explicitly requested actions; {"none"} when nothing is asked for."""
    actions: set[str] = set()
    if urls and (
        _any_match(lex.action_verbs["click"], body_text)
        or any(_is_cta_caption(u.visible_text, lex.cta_verbs) for u in urls)
    ):
        actions.add("click")
    if _any_match(lex.action_verbs["download"], body_text):
        actions.add("download")
    if _any_match(lex.action_verbs["reply/email"], body_text):
        actions.add("reply/email")
    if _any_match(lex.action_verbs["call"], body_text):
        actions.add("call")
    if _any_match(lex.action_verbs["other"], body_text):
        actions.add("other")
    return frozenset(actions) if actions else frozenset({"none"})


def code_company(
    sender_display: str,
    sender_address: str,
    subject: str,
    body_text: str,
    lex: Lexicons,
) -> tuple[str, ...]:
    """Impersonated organizations in recognizability (gazetteer) order.

    Longest names are matched first so a short name embedded in a longer
    one ("pay" in "paypal") cannot fire on its own. Generic internal
    references ("HR", "IT team") map to the sentinel "organization"."""
    haystack = "\n".join((sender_display, sender_address, subject, body_text))
    matched: list[str] = []
    for entry in sorted(lex.org_gazetteer, key=lambda e: -len(e.name)):
        if any(entry.name in longer for longer in matched):
            continue
        if _phrase_re(entry.name).search(haystack):
            matched.append(entry.name)
    if matched:
        order = {entry.name: i for i, entry in enumerate(lex.org_gazetteer)}
        return tuple(sorted(matched, key=lambda n: order[n]))
    if _any_match(lex.internal_org_terms, haystack):
        return ("organization",)
    return ("none",)


def _sector_scores(subject: str, body_text: str, lex: Lexicons) -> dict[str, int]:
    # subject hits are short and high-signal, so they count double
    scores: dict[str, int] = {}
    subj = subject or ""
    body = body_text or ""
    for sector, keywords in lex.sector_keywords.items():
        score = 0
        for kw in keywords:
            pattern = _phrase_re(kw)
            score += 2 * len(pattern.findall(subj)) + len(pattern.findall(body))
        scores[sector] = score
    return scores


def code_sector(
    company_names: Sequence[str],
    subject: str,
    body_text: str,
    lex: Lexicons,
) -> str:
    """One sector per email: the first company's gazetteer sector unless the
    content keywords clearly point elsewhere (package-delivery email from a
    shop codes logistics, not shopping)."""
    scores = _sector_scores(subject, body_text, lex)
    first = company_names[0] if company_names else "none"
    gaz_sector = lex.gazetteer_sector(first)
    top_score = max(scores.values(), default=0)
    leaders = sorted(s for s, v in scores.items() if v == top_score and v > 0)
    if gaz_sector is not None:
        if len(leaders) == 1 and leaders[0] != gaz_sector and top_score > scores.get(gaz_sector, 0):
            return leaders[0]
        return gaz_sector
    if len(leaders) == 1:
        return leaders[0]
    return "unknown"


def _sentence_end(text: str, start: int) -> int:
    m = _SENTENCE_END_RE.search(text, start)
    return m.start() if m else len(text)


def _clause_after(text: str, match: re.Match) -> str:
    """The purpose clause for a matched instruction: the "to ..." clause
    when one follows in the same sentence, else the instruction itself."""
    end = _sentence_end(text, match.end())
    tail = text[match.end() : end]
    to_match = re.search(r"(?<!\w)to(?!\w)", tail, re.IGNORECASE)
    if to_match:
        clause = tail[to_match.start() :]
    else:
        clause = text[match.start() : end]
    tokens = clause.split()[:8]
    return normalize_invivo(" ".join(tokens))


def code_action_specific(
    body_text: str, actions: frozenset[str], lex: Lexicons
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """(normalized phrases, raw extracts) naming why each action is asked."""
    if actions == frozenset({"none"}):
        return (), ()
    phrases: list[str] = []
    raws: list[str] = []

    def add(normalized: str, raw: str) -> None:
        if normalized and normalized not in phrases:
            phrases.append(normalized)
            raws.append(raw)

    for label in ("click", "download", "reply/email", "call", "other"):
        if label not in actions:
            continue
        best: re.Match | None = None
        for phrase in sorted(lex.action_verbs[label], key=len, reverse=True):
            m = _phrase_re(phrase).search(body_text)
            if m and (best is None or m.start() < best.start() or (m.start() == best.start() and m.end() > best.end())):
                best = m
        if best is not None:
            end = _sentence_end(body_text, best.end())
            add(_clause_after(body_text, best), body_text[best.start() : end].strip())
        elif label == "click":
            # link-caption call to action: the caption is the instruction
            for line in body_text.splitlines():
                line = line.strip()
                if line and _is_cta_caption(line, lex.cta_verbs):
                    add(normalize_invivo(line), line)
                    break
    return tuple(phrases), tuple(raws)


def _trim_edge_stopwords(phrase: str) -> str:
    tokens = phrase.split()
    while tokens and tokens[0] in STOPWORDS:
        tokens.pop(0)
    while tokens and tokens[-1] in STOPWORDS:
        tokens.pop()
    return " ".join(tokens)


def _trim_leading_stopwords(phrase: str) -> str:
    tokens = phrase.split()
    while tokens and tokens[0] in STOPWORDS:
        tokens.pop(0)
    return " ".join(tokens)


def code_main_topic(subject: str, body_text: str) -> tuple[str, str]:
    """(normalized topic, raw source phrase). The cleaned subject wins; an
    empty or purely generic subject falls back to the first body sentence."""
    cleaned = _SUBJECT_PREFIX_RE.sub("", subject or "").strip()
    candidate = _trim_leading_stopwords(normalize_invivo(cleaned))
    if candidate and candidate not in _GENERIC_SUBJECTS:
        return candidate, cleaned
    first = body_text.strip()
    end = _sentence_end(first, 0)
    sentence = first[:end].strip()
    tokens = _trim_edge_stopwords(normalize_invivo(sentence)).split()[:8]
    return " ".join(tokens), sentence


def code_email(
    record: EmailRecord,
    lex: Lexicons,
    schema: CodebookSchema,
    recipient_name: str = "",
    recipient_address: str = "",
) -> CodedEmail:
    """Apply every code rule to one record. Always yields a record that
    validates against `schema`."""
    # the recipient's own address in a greeting is not an organization claim
    body_for_company = record.body_text
    if recipient_address:
        body_for_company = re.sub(
            re.escape(recipient_address), " ", body_for_company, flags=re.IGNORECASE
        )
    companies = code_company(
        record.sender_display, record.sender_address, record.subject, body_for_company, lex
    )
    sector = code_sector(companies, record.subject, record.body_text, lex)
    actions = code_action_generic(record.body_text, record.urls, record.has_attachment, lex)
    specific, specific_raw = code_action_specific(record.body_text, actions, lex)
    topic, topic_raw = code_main_topic(record.subject, record.body_text)
    legit = lex.gazetteer_domain(companies[0]) if companies else None
    indirect = bool(
        sector == "document share" and legit and record.sender_domain == legit
    )
    return CodedEmail(
        email_id=record.id,
        company_names=companies,
        sector=sector if sector in schema.sectors else "unknown",
        salutation=code_salutation(record.body_text, recipient_name, recipient_address),
        threat=code_threat(record.subject, record.body_text, lex),
        urgency=code_urgency(record.subject, record.body_text, lex),
        actions_generic=actions,
        action_specific=specific,
        main_topic=topic,
        indirect_flag=indirect,
        main_topic_raw=topic_raw,
        action_specific_raw=specific_raw,
    )


def accuracy_report(
    predicted: Sequence[CodedEmail], gold: Sequence[CodedEmail]
) -> dict[str, float]:
    """Per-code exact-match rate of predictions against hand labels, keyed
    by code name, over the email_id intersection."""
    gold_by_id = {g.email_id: g for g in gold}
    pairs = [(p, gold_by_id[p.email_id]) for p in predicted if p.email_id in gold_by_id]
    if not pairs:
        raise ValueError("no shared email ids between predictions and gold labels")

    def rate(fn) -> float:
        return sum(1 for p, g in pairs if fn(p) == fn(g)) / len(pairs)

    return {
        "n_items": len(pairs),
        "company": rate(lambda c: tuple(c.company_names)),
        "sector": rate(lambda c: c.sector),
        "salutation": rate(lambda c: c.salutation),
        "threat": rate(lambda c: c.threat),
        "urgency": rate(lambda c: c.urgency),
        "action": rate(lambda c: frozenset(c.actions_generic)),
        "action_specific": rate(lambda c: tuple(c.action_specific)),
        "main_topic": rate(lambda c: c.main_topic),
    }
