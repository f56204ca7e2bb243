"""Chance-corrected agreement between two coders: Cohen's kappa and
Krippendorff's alpha (nominal), per code and averaged."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from phishcode.codebook import CodedEmail

DEFAULT_IRR_CODES = ("company", "sector", "salutation", "threat", "urgency", "action")

_CODE_EXTRACTORS = {
    "company": lambda c: ", ".join(sorted(c.company_names)),
    "sector": lambda c: c.sector,
    "salutation": lambda c: c.salutation,
    "threat": lambda c: c.threat,
    "urgency": lambda c: c.urgency,
    "action": lambda c: ", ".join(sorted(c.actions_generic)),
    "action_specific": lambda c: ", ".join(sorted(c.action_specific)),
    "main_topic": lambda c: c.main_topic,
}


@dataclass(frozen=True)
class KappaResult:
    kappa: float
    p_o: float
    p_e: float
    degenerate: bool = False


@dataclass(frozen=True)
class AlphaResult:
    alpha: float
    d_o: float
    d_e: float
    degenerate: bool = False


def cohen_kappa(a: Sequence[str], b: Sequence[str]) -> KappaResult:
    """kappa = (p_o - p_e) / (1 - p_e), expected agreement from the product
    of the two coders' marginals. Both coders constant on the same label is
    total agreement, so kappa is 1 by convention (flagged)."""
    if len(a) != len(b):
        raise ValueError(f"sequence lengths differ: {len(a)} != {len(b)}")
    if not a:
        raise ValueError("need at least one item")
    n = len(a)
    p_o = sum(1 for x, y in zip(a, b) if x == y) / n
    count_a = Counter(a)
    count_b = Counter(b)
    p_e = sum(count_a[label] * count_b.get(label, 0) for label in sorted(count_a)) / (n * n)
    if len(count_a) == 1 and count_a == count_b:
        return KappaResult(kappa=1.0, p_o=1.0, p_e=1.0, degenerate=True)
    return KappaResult(kappa=(p_o - p_e) / (1 - p_e), p_o=p_o, p_e=p_e)


def krippendorff_alpha(a: Sequence[str], b: Sequence[str]) -> AlphaResult:
    """Nominal alpha = 1 - D_o/D_e over the coincidence matrix of
    within-unit value pairs. A single value across all units leaves chance
    disagreement undefined; agreement is total, so alpha is 1 (flagged)."""
    if len(a) != len(b):
        raise ValueError(f"sequence lengths differ: {len(a)} != {len(b)}")
    if len(a) < 2:
        raise ValueError("need at least two pairable items")
    n_units = len(a)
    n = 2 * n_units
    pooled = Counter(a)
    pooled.update(b)
    # within-unit ordered pairs, weight 1/(m_u - 1) = 1 for two coders
    disagree = sum(2 for x, y in zip(a, b) if x != y)
    d_o = disagree / n
    sum_sq = sum(c * c for c in pooled.values())
    d_e = (n * n - sum_sq) / (n * (n - 1))
    if d_e == 0:
        return AlphaResult(alpha=1.0, d_o=d_o, d_e=0.0, degenerate=True)
    return AlphaResult(alpha=1.0 - d_o / d_e, d_o=d_o, d_e=d_e)


@dataclass(frozen=True)
class AnnotationSet:
    """One coder's labels: code name -> email_id -> label string."""

    coder_id: str
    labels: Mapping[str, Mapping[str, str]]

    @classmethod
    def from_coded(
        cls,
        coder_id: str,
        coded: Sequence[CodedEmail],
        codes: Sequence[str] = DEFAULT_IRR_CODES,
    ) -> "AnnotationSet":
        labels: dict[str, dict[str, str]] = {code: {} for code in codes}
        for c in coded:
            for code in codes:
                labels[code][c.email_id] = _CODE_EXTRACTORS[code](c)
        return cls(coder_id=coder_id, labels=labels)


@dataclass(frozen=True)
class CodeAgreement:
    kappa: float
    alpha: float
    p_o: float
    p_e: float
    n_items: int
    excluded: int
    degenerate: bool = False


@dataclass(frozen=True)
class AgreementReport:
    coder_a: str
    coder_b: str
    per_code: dict[str, CodeAgreement]
    overall_kappa: float
    overall_alpha: float
    n_shared: int

    def to_json(self) -> str:
        payload = {
            "coder_a": self.coder_a,
            "coder_b": self.coder_b,
            "n_shared": self.n_shared,
            "overall_kappa": self.overall_kappa,
            "overall_alpha": self.overall_alpha,
            "per_code": {
                code: {
                    "kappa": round(r.kappa, 6),
                    "alpha": round(r.alpha, 6),
                    "p_o": round(r.p_o, 6),
                    "p_e": round(r.p_e, 6),
                    "n_items": r.n_items,
                    "excluded": r.excluded,
                    "degenerate": r.degenerate,
                }
                for code, r in self.per_code.items()
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text_table(self) -> str:
        rows = [("Code", "C. Kappa", "K. Alpha", "Items")]
        for code, r in self.per_code.items():
            rows.append((code, f"{r.kappa:.2f}", f"{r.alpha:.2f}", str(r.n_items)))
        rows.append(("overall", f"{self.overall_kappa:.2f}", f"{self.overall_alpha:.2f}", str(self.n_shared)))
        widths = [max(len(row[i]) for row in rows) for i in range(4)]
        lines = []
        for i, row in enumerate(rows):
            lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
            if i == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines)


def agreement_report(
    set_a: AnnotationSet,
    set_b: AnnotationSet,
    codes: Sequence[str] | None = None,
) -> AgreementReport:
    """Per-code kappa/alpha over the email ids both coders labelled, plus
    their unweighted means. Items one coder skipped are excluded and
    counted."""
    codes = tuple(codes) if codes is not None else tuple(
        c for c in set_a.labels if c in set_b.labels
    )
    if not codes:
        raise ValueError("no codes shared between annotation sets")
    all_shared = set()
    for code in codes:
        all_shared |= set(set_a.labels.get(code, {})) & set(set_b.labels.get(code, {}))
    if not all_shared:
        raise ValueError("annotation sets share no email ids")

    per_code: dict[str, CodeAgreement] = {}
    for code in codes:
        la = set_a.labels.get(code, {})
        lb = set_b.labels.get(code, {})
        shared = sorted(set(la) & set(lb))
        if not shared:
            raise ValueError(f"no shared email ids for code {code!r}")
        excluded = len(set(la) ^ set(lb))
        seq_a = [la[i] for i in shared]
        seq_b = [lb[i] for i in shared]
        k = cohen_kappa(seq_a, seq_b)
        al = krippendorff_alpha(seq_a, seq_b)
        per_code[code] = CodeAgreement(
            kappa=k.kappa,
            alpha=al.alpha,
            p_o=k.p_o,
            p_e=k.p_e,
            n_items=len(shared),
            excluded=excluded,
            degenerate=k.degenerate or al.degenerate,
        )
    overall_kappa = sum(r.kappa for r in per_code.values()) / len(per_code)
    overall_alpha = sum(r.alpha for r in per_code.values()) / len(per_code)
    return AgreementReport(
        coder_a=set_a.coder_id,
        coder_b=set_b.coder_id,
        per_code=per_code,
        overall_kappa=overall_kappa,
        overall_alpha=overall_alpha,
        n_shared=len(all_shared),
    )
