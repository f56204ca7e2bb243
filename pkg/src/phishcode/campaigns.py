"""Campaign-style grouping: four refinement layers over the coded fields,
then per-cluster statistics.

Layer 1 splits on sector, layer 2 on the full action set, layer 3 on the
first impersonated organization, layer 4 on (main topic, specific action)
under either exact equality or single-linkage Levenshtein."""

from __future__ import annotations

import json
import statistics
from dataclasses import dataclass
from typing import Literal, Mapping, Optional, Sequence

from phishcode.codebook import CodedEmail
from phishcode.distance import levenshtein
from phishcode.records import EmailRecord

Matcher = Literal["exact", "levenshtein"]
DEFAULT_LEV_THRESHOLD = 5


@dataclass(frozen=True)
class ClusterKey:
    """Coded values shared by every member, populated up to `depth`."""

    depth: int
    sector: str
    action_set: Optional[str] = None
    company: Optional[str] = None
    topic: Optional[str] = None
    action_specific: Optional[str] = None

    def as_tuple(self) -> tuple:
        return (self.sector, self.action_set, self.company, self.topic, self.action_specific)[
            : self.depth if self.depth < 4 else 5
        ]


@dataclass(frozen=True)
class Cluster:
    key: ClusterKey
    member_ids: tuple[str, ...]

    @property
    def size(self) -> int:
        return len(self.member_ids)


@dataclass(frozen=True)
class MultiLayerClustering:
    layers: dict[int, tuple[Cluster, ...]]

    @property
    def leaves(self) -> tuple[Cluster, ...]:
        return self.layers[4]


def _canonical_actions(coded: CodedEmail) -> str:
    return ", ".join(sorted(coded.actions_generic))


def _first_company(coded: CodedEmail) -> str:
    return coded.company_names[0] if coded.company_names else "none"


def _leaf_text(coded: CodedEmail) -> tuple[str, str]:
    return coded.main_topic, ", ".join(coded.action_specific)


def _lev_components(items: list[tuple[tuple[str, str], list[str]]], threshold: int) -> list[list[int]]:
    """Single-linkage components over distinct (topic, specific) pairs: an
    edge wherever both strings are within `threshold` edits."""
    n = len(items)
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for i in range(n):
        topic_i, spec_i = items[i][0]
        for j in range(i + 1, n):
            topic_j, spec_j = items[j][0]
            if (
                levenshtein(topic_i, topic_j) <= threshold
                and levenshtein(spec_i, spec_j) <= threshold
            ):
                union(i, j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return [groups[root] for root in sorted(groups)]


def cluster_multilayer(
    coded: Sequence[CodedEmail],
    matcher: Matcher = "exact",
    lev_threshold: int = DEFAULT_LEV_THRESHOLD,
) -> MultiLayerClustering:
    """Partition the corpus four times, each layer refining the previous.

    Keys, not input order, define the clusters, so any permutation of
    `coded` produces the same partition. Every email lands in exactly one
    leaf.
    """
    by_id = {}
    for c in coded:
        by_id[c.email_id] = c
    items = [by_id[i] for i in sorted(by_id)]

    def build_layer(depth: int, key_fn) -> tuple[Cluster, ...]:
        groups: dict[tuple, list[str]] = {}
        for c in items:
            groups.setdefault(key_fn(c), []).append(c.email_id)
        clusters = []
        for key in sorted(groups):
            clusters.append(
                Cluster(key=_make_key(depth, key), member_ids=tuple(sorted(groups[key])))
            )
        return tuple(clusters)

    def _make_key(depth: int, parts: tuple) -> ClusterKey:
        fields = ["sector", "action_set", "company", "topic", "action_specific"]
        kwargs = dict(zip(fields, parts))
        return ClusterKey(depth=depth, **kwargs)

    layer1 = build_layer(1, lambda c: (c.sector,))
    layer2 = build_layer(2, lambda c: (c.sector, _canonical_actions(c)))
    layer3 = build_layer(
        3, lambda c: (c.sector, _canonical_actions(c), _first_company(c))
    )

    if matcher == "exact":
        layer4 = build_layer(
            4,
            lambda c: (c.sector, _canonical_actions(c), _first_company(c), *_leaf_text(c)),
        )
    elif matcher == "levenshtein":
        leaf_clusters: list[Cluster] = []
        for parent in layer3:
            texts: dict[tuple[str, str], list[str]] = {}
            for email_id in parent.member_ids:
                texts.setdefault(_leaf_text(by_id[email_id]), []).append(email_id)
            pairs = sorted(texts.items())
            for component in _lev_components(pairs, lev_threshold):
                members: list[str] = []
                for idx in component:
                    members.extend(pairs[idx][1])
                anchor_topic, anchor_spec = pairs[component[0]][0]
                leaf_clusters.append(
                    Cluster(
                        key=ClusterKey(
                            depth=4,
                            sector=parent.key.sector,
                            action_set=parent.key.action_set,
                            company=parent.key.company,
                            topic=anchor_topic,
                            action_specific=anchor_spec,
                        ),
                        member_ids=tuple(sorted(members)),
                    )
                )
        layer4 = tuple(sorted(leaf_clusters, key=lambda cl: (cl.key.as_tuple(), cl.member_ids)))
    else:
        raise ValueError(f"unknown matcher: {matcher!r}")

    return MultiLayerClustering(layers={1: layer1, 2: layer2, 3: layer3, 4: layer4})


@dataclass(frozen=True)
class ClusterStats:
    total_clusters: int
    multi_clusters: int
    large_clusters: int
    mean_size_excl_singletons: Optional[float]
    median_size_excl_singletons: Optional[float]


def cluster_stats(clusters: Sequence[Cluster]) -> ClusterStats:
    if not clusters:
        raise ValueError("no clusters to summarize")
    sizes = [c.size for c in clusters]
    multi = [s for s in sizes if s > 1]
    return ClusterStats(
        total_clusters=len(sizes),
        multi_clusters=len(multi),
        large_clusters=sum(1 for s in sizes if s > 5),
        mean_size_excl_singletons=statistics.mean(multi) if multi else None,
        median_size_excl_singletons=statistics.median(multi) if multi else None,
    )


@dataclass(frozen=True)
class ClusterSummary:
    key: ClusterKey
    size: int
    years: tuple[int, ...]
    avg_subject_levenshtein: float
    unique_sender_domains: int
    unique_url_domains: int
    sample_topics: tuple[str, ...]


def summarize_cluster(
    cluster: Cluster,
    records: Mapping[str, EmailRecord],
    coded: Mapping[str, CodedEmail] | None = None,
) -> ClusterSummary:
    """Member-pair subject distance (raw subjects, singletons score 0) plus
    domain diversity, the signals that separate one campaign's variations
    from unrelated mail."""
    members = []
    for email_id in cluster.member_ids:
        if email_id not in records:
            raise ValueError(f"cluster member not in record index: {email_id}")
        members.append(records[email_id])

    subjects = [m.subject for m in members]
    pair_count = 0
    total = 0
    for i in range(len(subjects)):
        for j in range(i + 1, len(subjects)):
            total += levenshtein(subjects[i], subjects[j])
            pair_count += 1
    avg = total / pair_count if pair_count else 0.0

    url_domains = set()
    for m in members:
        for u in m.urls:
            if u.href_domain:
                url_domains.add(u.href_domain)
    topics: list[str] = []
    if coded:
        for email_id in cluster.member_ids:
            c = coded.get(email_id)
            if c and c.main_topic and c.main_topic not in topics:
                topics.append(c.main_topic)
    elif cluster.key.topic:
        topics.append(cluster.key.topic)

    return ClusterSummary(
        key=cluster.key,
        size=cluster.size,
        years=tuple(sorted({m.date.year for m in members if m.date})),
        avg_subject_levenshtein=avg,
        unique_sender_domains=len({m.sender_domain for m in members if m.sender_domain}),
        unique_url_domains=len(url_domains),
        sample_topics=tuple(topics[:3]),
    )


def summaries_to_json(summaries: Sequence[ClusterSummary]) -> str:
    payload = []
    for s in summaries:
        payload.append(
            {
                "sector": s.key.sector,
                "action_set": s.key.action_set,
                "company": s.key.company,
                "topic": s.key.topic,
                "action_specific": s.key.action_specific,
                "size": s.size,
                "years": list(s.years),
                "avg_subject_levenshtein": round(s.avg_subject_levenshtein, 2),
                "unique_sender_domains": s.unique_sender_domains,
                "unique_url_domains": s.unique_url_domains,
                "sample_topics": list(s.sample_topics),
            }
        )
    return json.dumps(payload, indent=2, sort_keys=True)


def summaries_to_text_table(summaries: Sequence[ClusterSummary]) -> str:
    rows = [("Attributes", "Main Topic and Action", "No.", "Years", "Subject", "From", "URLs")]
    for s in summaries:
        attributes = f"{s.key.sector} [{s.key.company or '-'}] {s.key.action_set or ''}".strip()
        topic = " / ".join(x for x in (s.key.topic, s.key.action_specific) if x) or (
            "; ".join(s.sample_topics)
        )
        years = "-".join(str(y) for y in (s.years[:1] + s.years[-1:])) if s.years else "-"
        rows.append(
            (
                attributes,
                topic,
                str(s.size),
                years,
                f"{s.avg_subject_levenshtein:.1f}",
                str(s.unique_sender_domains),
                str(s.unique_url_domains),
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


def transport_table(
    cluster: Cluster, records: Mapping[str, EmailRecord]
) -> str:
    """Per-member transport comparison: sender identity, origin IP, main
    link domain, DKIM presence."""
    rows = [("ID", "Sender Name", "Sender Address", "First IP", "Main URL Domain", "DKIM")]
    for email_id in cluster.member_ids:
        rec = records[email_id]
        main_domain = next((u.href_domain for u in rec.urls if u.href_domain), "-")
        rows.append(
            (
                rec.id,
                rec.sender_display or "-",
                rec.sender_address or "-",
                rec.transport.first_ip or "-",
                main_domain,
                "present" if rec.transport.dkim_present else "none",
            )
        )
    widths = [max(len(r[i]) for r in rows) for i in range(len(rows[0]))]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)
