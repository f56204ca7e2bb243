import io
import json

import pytest

from conftest import make_coded
from phishcode.reports import cooccurrence_report, distribution_report


def corpus_with(threats=("threat", "none", "none", "none")):
    return [
        make_coded(f"2020_{i:03d}", threat=value) for i, value in enumerate(threats, 1)
    ]


class TestDistribution:
    def test_percentage_arithmetic(self):
        report = distribution_report(corpus_with())
        assert report.per_code["threat"]["threat"] == (1, 25.00)
        assert report.per_code["threat"]["none"] == (3, 75.00)

    def test_single_valued_codes_sum_to_denominator(self, labeled_predictions):
        report = distribution_report(labeled_predictions)
        for code in ("sector", "salutation", "threat", "urgency"):
            assert sum(c for c, _ in report.per_code[code].values()) == report.denominator

    def test_rounding_half_up(self):
        # 1 of 3 = 33.333..% -> 33.33; 2 of 3 -> 66.67
        report = distribution_report(corpus_with(("threat", "none", "none")))
        assert report.per_code["threat"]["threat"][1] == 33.33
        assert report.per_code["threat"]["none"][1] == 66.67

    def test_multi_valued_counts_use_email_denominator(self):
        coded = [
            make_coded("2020_001", company=("microsoft", "outlook")),
            make_coded("2020_002", company=("microsoft",)),
        ]
        report = distribution_report(coded)
        assert report.per_code["company"]["microsoft"] == (2, 100.00)
        assert report.per_code["company"]["outlook"] == (1, 50.00)

    def test_top_phrases_and_tokens_skip_stopwords(self):
        coded = [
            make_coded("2020_001", actions=frozenset({"click"}),
                       specific=("verify your account",), topic="verify your account"),
            make_coded("2020_002", actions=frozenset({"click"}),
                       specific=("verify your account",), topic="update account"),
        ]
        report = distribution_report(coded)
        assert report.top_phrases["action_specific"][0] == ("verify your account", 2)
        tokens = dict(report.top_tokens["main_topic"])
        assert "your" not in tokens  # stopword
        assert tokens["account"] == 2

    def test_order_invariance(self, labeled_predictions):
        a = distribution_report(labeled_predictions)
        b = distribution_report(list(reversed(labeled_predictions)))
        assert a == b

    def test_empty_is_error(self):
        with pytest.raises(ValueError):
            distribution_report([])

    def test_outputs_render(self, labeled_predictions):
        report = distribution_report(labeled_predictions)
        payload = json.loads(report.to_json())
        assert payload["denominator"] == 50
        text = report.to_text_table()
        assert "sector" in text
        buf = io.StringIO()
        report.write_csv(buf)
        assert buf.getvalue().startswith("code,label,count,percent")


def mixed_urgency_threat():
    coded = []
    for i in range(1, 11):
        urgent = "urgent" if i <= 5 else "none"
        threat = "threat" if i <= 8 else "none"
        both = i <= 4
        coded.append(
            make_coded(
                f"2020_{i:03d}",
                urgency="urgent" if (urgent == "urgent" and i <= 4) or i == 5 else urgent,
                threat=threat,
            )
        )
    return coded


class TestCooccurrence:
    def test_disjoint_fixture(self):
        coded = [
            make_coded("2020_001", threat="threat", urgency="none"),
            make_coded("2020_002", threat="none", urgency="urgent"),
        ]
        result = cooccurrence_report(coded, "urgency", "threat", "urgent", "threat")
        assert result.count == 0

    def test_counts_and_fractions(self):
        # 10 emails, 5 urgent, 8 threat, 4 with both
        coded = []
        for i in range(1, 11):
            coded.append(
                make_coded(
                    f"2020_{i:03d}",
                    urgency="urgent" if i <= 5 else "none",
                    threat="threat" if (i <= 4 or 6 <= i <= 9) else "none",
                )
            )
        result = cooccurrence_report(coded, "urgency", "threat", "urgent", "threat")
        assert result.marginal_a == 5
        assert result.marginal_b == 8
        assert result.count == 4
        assert result.frac_of_a == pytest.approx(0.8)
        assert result.frac_of_b == pytest.approx(0.5)

    def test_count_bounded_by_marginals(self, labeled_predictions):
        result = cooccurrence_report(labeled_predictions, "urgency", "threat", "urgent", "threat")
        assert result.count <= min(result.marginal_a, result.marginal_b)

    def test_multi_valued_membership(self):
        coded = [
            make_coded("2020_001", company=("paypal",), actions=frozenset({"click", "download"})),
            make_coded("2020_002", company=("paypal",), actions=frozenset({"none"})),
        ]
        result = cooccurrence_report(coded, "company", "action", "paypal", "click")
        assert result.count == 1
        assert result.marginal_a == 2

    def test_unknown_code_is_error(self):
        with pytest.raises(ValueError):
            cooccurrence_report([make_coded()], "sentiment", "threat", "x", "y")
