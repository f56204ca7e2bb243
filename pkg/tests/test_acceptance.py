"""Acceptance criteria, one test per criterion.

The always-runnable checks need no external data and stay within the time
budget. The replication checks against the published coded dataset run only
when that dataset is present (PHISHCODE_PUBLISHED_DIR or tests/data/published);
without it they skip with the reason recorded, they never fail.

A one-line PASS/FAIL/SKIP summary per criterion is printed at the end of the
run (see pytest_terminal_summary in conftest).
"""

import os
import random
import string
import subprocess
import sys
import time
from pathlib import Path

import pytest

from conftest import DATA, RECIPIENT_ADDRESS, RECIPIENT_NAME, make_coded
from golden_guidance_cases import all_cases
from irr_oracle import alpha_bruteforce, kappa_bruteforce
from phishcode.agreement import AnnotationSet, agreement_report, cohen_kappa, krippendorff_alpha
from phishcode.autocoder import accuracy_report, code_email
from phishcode.campaigns import cluster_multilayer, cluster_stats
from phishcode.codebook import read_coded_csv
from phishcode.distance import levenshtein
from phishcode.guidance import generate_guidance
from phishcode.reports import cooccurrence_report, distribution_report

pytestmark = pytest.mark.acceptance

PUBLISHED_DIR = Path(os.environ.get("PHISHCODE_PUBLISHED_DIR", DATA / "published"))
SKIP_REASON = (
    "released coded dataset not present (set PHISHCODE_PUBLISHED_DIR or add "
    "tests/data/published/); replication criteria are skipped, not failed"
)


def _published(name: str) -> Path:
    path = PUBLISHED_DIR / name
    if not path.is_file():
        pytest.skip(SKIP_REASON)
    return path


# --- replication against the released labels (skip without the data) --------


def test_published_step3_clustering_counts():
    coded = list(read_coded_csv(_published("coded_labels.csv")))
    assert len(coded) == 503
    start = time.monotonic()
    result = cluster_multilayer(coded, matcher="exact")
    stats = cluster_stats(result.layers[3])
    elapsed = time.monotonic() - start
    assert elapsed < 5.0
    assert stats.total_clusters == 104
    assert stats.multi_clusters == 36
    assert stats.large_clusters == 14
    assert stats.mean_size_excl_singletons == pytest.approx(11.25, abs=0.01)
    assert stats.median_size_excl_singletons == pytest.approx(4.00, abs=0.01)


def test_published_distribution_percentages():
    coded = list(read_coded_csv(_published("coded_labels.csv")))
    report = distribution_report(coded)

    def pct(code, label):
        return report.per_code[code][label][1]

    assert pct("company", "none") == pytest.approx(27.43, abs=0.01)
    assert pct("company", "monkey") == pytest.approx(18.09, abs=0.01)
    assert pct("company", "usaa") == pytest.approx(8.75, abs=0.01)
    assert pct("company", "paypal") == pytest.approx(6.16, abs=0.01)
    assert pct("sector", "email") == pytest.approx(45.13, abs=0.01)
    assert pct("sector", "financial") == pytest.approx(30.02, abs=0.01)
    assert pct("salutation", "none") == pytest.approx(34.00, abs=0.01)
    assert pct("salutation", "generic") == pytest.approx(31.41, abs=0.01)
    assert pct("salutation", "email") == pytest.approx(21.67, abs=0.01)
    assert pct("salutation", "name") == pytest.approx(12.92, abs=0.01)
    assert pct("threat", "threat") == pytest.approx(44.33, abs=0.01)
    assert pct("urgency", "urgent") == pytest.approx(35.19, abs=0.01)
    assert report.per_code["action"]["click"][0] == 433
    assert report.per_code["action"]["click"][1] == pytest.approx(86.08, abs=0.01)
    assert report.per_code["action"]["download"][0] == 67
    cooc = cooccurrence_report(coded, "urgency", "threat", "urgent", "threat")
    assert cooc.count == 142


def test_published_dual_coder_reliability():
    coder_a = list(read_coded_csv(_published("coder1_labels.csv")))
    coder_b = list(read_coded_csv(_published("coder2_labels.csv")))
    report = agreement_report(
        AnnotationSet.from_coded("coder1", coder_a),
        AnnotationSet.from_coded("coder2", coder_b),
    )
    expected = {
        "company": (0.96, 0.96),
        "sector": (0.94, 0.94),
        "salutation": (0.94, 0.95),
        "threat": (0.96, 0.96),
        "urgency": (0.80, 0.80),
        "action": (0.94, 0.94),
    }
    for code, (kappa, alpha) in expected.items():
        assert report.per_code[code].kappa == pytest.approx(kappa, abs=0.005)
        assert report.per_code[code].alpha == pytest.approx(alpha, abs=0.005)
    assert report.overall_kappa == pytest.approx(0.93, abs=0.005)
    assert report.overall_alpha == pytest.approx(0.93, abs=0.005)


# --- always-runnable criteria ------------------------------------------------


def test_kappa_alpha_five_item_oracle():
    a = ["A", "A", "B", "B", "A"]
    b = ["A", "B", "B", "B", "A"]
    kappa = cohen_kappa(a, b)
    alpha = krippendorff_alpha(a, b)
    assert kappa.kappa == pytest.approx(0.6154, abs=1e-4)
    assert alpha.alpha == pytest.approx(0.6400, abs=1e-4)
    # and both agree with the committed pair-enumeration oracle
    assert kappa.kappa == pytest.approx(kappa_bruteforce(a, b)["kappa"], abs=1e-12)
    assert alpha.alpha == pytest.approx(alpha_bruteforce(a, b)["alpha"], abs=1e-12)


def test_levenshtein_metric_axioms_ten_thousand_triples():
    assert levenshtein("kitten", "sitting") == 3
    assert levenshtein("Iimited", "Limited") == 1
    rng = random.Random(8181)
    alphabet = "abcde"
    for _ in range(10_000):
        s, t, u = (
            "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 12))) for _ in range(3)
        )
        d_st = levenshtein(s, t)
        assert d_st >= 0
        assert (d_st == 0) == (s == t)
        assert d_st == levenshtein(t, s)
        assert levenshtein(s, u) <= d_st + levenshtein(t, u)


def _random_coded_corpus(rng, n):
    sectors = ["financial", "email", "document share", "unknown", "logistics"]
    companies = [("none",), ("paypal",), ("usaa",), ("organization",), ("wetransfer", "monkey")]
    action_sets = [
        frozenset({"click"}),
        frozenset({"download"}),
        frozenset({"click", "download"}),
        frozenset({"none"}),
    ]
    topics = ["account notice", "verify account", "files waiting", ""]
    specifics = [(), ("verify account",), ("get file",)]
    return [
        make_coded(
            f"{rng.randint(2015, 2021)}_{i:04d}",
            company=rng.choice(companies),
            sector=rng.choice(sectors),
            actions=rng.choice(action_sets),
            specific=rng.choice(specifics),
            topic=rng.choice(topics)
            if rng.random() > 0.25
            else "".join(rng.choice(string.ascii_lowercase + " ") for _ in range(rng.randint(0, 14))),
        )
        for i in range(n)
    ]


def test_clustering_invariants_thousand_corpora():
    rng = random.Random(515001)
    for _ in range(1000):
        corpus = _random_coded_corpus(rng, rng.randint(1, 200))
        ids = sorted(c.email_id for c in corpus)
        result = cluster_multilayer(corpus, matcher="exact")
        previous = None
        for depth in (1, 2, 3, 4):
            layer = result.layers[depth]
            members = sorted(m for c in layer for m in c.member_ids)
            assert members == ids  # partition at every depth
            if previous is not None:
                assert len(layer) >= len(previous)
                parent_of = {m: i for i, p in enumerate(previous) for m in p.member_ids}
                for child in layer:
                    assert len({parent_of[m] for m in child.member_ids}) == 1  # refinement
            previous = layer
        shuffled = corpus[:]
        rng.shuffle(shuffled)
        assert {c.member_ids for c in cluster_multilayer(shuffled, matcher="exact").leaves} == {
            c.member_ids for c in result.leaves
        }  # order invariance
        zero = cluster_multilayer(corpus, matcher="levenshtein", lev_threshold=0)
        assert {c.member_ids for c in zero.leaves} == {c.member_ids for c in result.leaves}


def test_planted_campaign_recovery():
    from test_campaigns import planted_corpus

    coded, _, truth = planted_corpus()
    result = cluster_multilayer(coded, matcher="levenshtein", lev_threshold=5)
    for cluster in result.leaves:
        assert len({truth[m] for m in cluster.member_ids}) == 1  # pairwise purity 1.0
    assert sorted(c.size for c in result.leaves if c.size > 1) == [10, 10, 10]


def test_autocoder_golden_and_fixture_accuracy(
    wetransfer_record, labeled_predictions, labeled_gold, lexicons, schema
):
    coded = code_email(
        wetransfer_record,
        lexicons,
        schema,
        recipient_name=RECIPIENT_NAME,
        recipient_address=RECIPIENT_ADDRESS,
    )
    assert coded.sector == "document share"
    assert coded.actions_generic == {"click"}
    assert coded.threat == "none"
    assert coded.urgency == "none"
    assert coded.company_names == ("wetransfer",)
    report = accuracy_report(labeled_predictions, labeled_gold)
    assert report["n_items"] == 50
    assert report["threat"] >= 0.9
    assert report["urgency"] >= 0.9


def test_kappa_alpha_properties_thousand_pairs():
    rng = random.Random(424242)
    for _ in range(1000):
        n = rng.randint(2, 60)
        alphabet = list(string.ascii_uppercase[: rng.randint(1, 5)])
        a = [rng.choice(alphabet) for _ in range(n)]
        b = [rng.choice(alphabet) for _ in range(n)]
        kappa = cohen_kappa(a, b)
        alpha = krippendorff_alpha(a, b)
        assert -1.0 - 1e-12 <= kappa.kappa <= 1.0 + 1e-12
        assert -1.0 - 1e-12 <= alpha.alpha <= 1.0 + 1e-12
        perm = alphabet[:]
        rng.shuffle(perm)
        mapping = dict(zip(alphabet, perm))
        a2, b2 = [mapping[x] for x in a], [mapping[x] for x in b]
        assert cohen_kappa(a2, b2).kappa == pytest.approx(kappa.kappa, abs=1e-12)
        assert krippendorff_alpha(a2, b2).alpha == pytest.approx(alpha.alpha, abs=1e-12)
    # extremes
    assert cohen_kappa(["x", "y"] * 10, ["x", "y"] * 10).kappa == 1.0
    assert krippendorff_alpha(["x", "y"] * 10, ["x", "y"] * 10).alpha == 1.0
    rng = random.Random(11)
    n = 10_000
    a = [rng.choice("ABCD") for _ in range(n)]
    b = [rng.choice("ABCD") for _ in range(n)]
    assert abs(cohen_kappa(a, b).kappa) < 0.1
    assert abs(krippendorff_alpha(a, b).alpha) < 0.1


def test_pipeline_determinism_two_processes(tmp_path):
    mbox = DATA / "labeled_50.mbox"
    script = (
        "import sys\n"
        "from phishcode.cli import main\n"
        "base, mbox = sys.argv[1], sys.argv[2]\n"
        "assert main(['ingest', '--input', mbox, '--out', base]) == 0\n"
        "assert main(['code', '--input', base + '/records.jsonl', '--out', base,"
        " '--recipient-name', 'Jose', '--recipient-email', 'jose@monkey.org']) == 0\n"
        "assert main(['sample', '--input', base + '/records.jsonl', '--out', base,"
        " '--year', '2018', '--window', '3', '--sample-size', '5', '--seed', '7']) == 0\n"
        "assert main(['cluster', '--input', base + '/coded.jsonl', '--out', base,"
        " '--records', base + '/records.jsonl']) == 0\n"
        "assert main(['report', '--input', base + '/coded.jsonl', '--out', base]) == 0\n"
    )
    runs = []
    for name in ("a", "b"):
        base = tmp_path / name
        subprocess.run([sys.executable, "-c", script, str(base), str(mbox)], check=True)
        runs.append(base)
    one, two = runs
    rels = sorted(p.relative_to(one) for p in one.rglob("*") if p.is_file())
    assert rels == sorted(p.relative_to(two) for p in two.rglob("*") if p.is_file())
    for rel in rels:
        assert (one / rel).read_bytes() == (two / rel).read_bytes(), rel


def test_guidance_goldens_and_verdict_monotonicity():
    golden_dir = DATA / "golden_guidance"
    cases = list(all_cases())
    assert len(cases) == 12
    for name, coded, record in cases:
        response = generate_guidance(coded, record)
        assert response.to_json() + "\n" == (golden_dir / f"{name}.json").read_text("utf-8")
        assert response.to_text() == (golden_dir / f"{name}.txt").read_text("utf-8")

    from conftest import make_record
    from phishcode.codebook import ACTIONS, CANONICAL_SECTORS
    from phishcode.guidance import VERDICTS
    from phishcode.records import UrlRef

    severity = {v: i for i, v in enumerate(VERDICTS)}
    rng = random.Random(90125)
    for i in range(500):
        coded = make_coded(
            f"2021_{i:03d}",
            company=rng.choice([("paypal",), ("none",), ("wetransfer",), ("organization",)]),
            sector=rng.choice(list(CANONICAL_SECTORS)),
            threat=rng.choice(["threat", "none"]),
            urgency=rng.choice(["urgent", "none"]),
            actions=frozenset({rng.choice(ACTIONS)}),
        )
        clean = make_record(id=coded.email_id, sender_address="x@paypal.com")
        dirty = make_record(
            id=coded.email_id,
            sender_address="x@paypal.com",
            urls=(UrlRef("link", "http://spoof.example.org/x", "spoof.example.org", False),),
        )
        before = generate_guidance(coded, clean)
        after = generate_guidance(coded, dirty)
        assert severity[after.overall_verdict] >= severity[before.overall_verdict]
