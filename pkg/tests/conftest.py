import sys
from datetime import datetime, timezone
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from phishcode.autocoder import code_email
from phishcode.codebook import CodebookSchema, CodedEmail, read_coded_csv
from phishcode.lexicons import load_lexicons
from phishcode.mailparse import assign_ids, parse_mailbox
from phishcode.records import EmailRecord, TransportMeta

DATA = Path(__file__).parent / "data"
RECIPIENT_NAME = "Jose"
RECIPIENT_ADDRESS = "jose@monkey.org"


@pytest.fixture(scope="session")
def lexicons():
    return load_lexicons()


@pytest.fixture(scope="session")
def schema():
    return CodebookSchema()


@pytest.fixture(scope="session")
def labeled_records():
    raws = parse_mailbox((DATA / "labeled_50.mbox").read_bytes(), fmt="mbox")
    return assign_ids(raws)


@pytest.fixture(scope="session")
def labeled_gold():
    return list(read_coded_csv(DATA / "labeled_50_labels.csv"))


@pytest.fixture(scope="session")
def labeled_predictions(labeled_records, lexicons, schema):
    return [
        code_email(
            rec,
            lexicons,
            schema,
            recipient_name=RECIPIENT_NAME,
            recipient_address=RECIPIENT_ADDRESS,
        )
        for rec in labeled_records
    ]


WETRANSFER_EML = b"""From: WeTransfer <noreply@wetransfer-mailer.example.net>
To: jose@monkey.org
Subject: Notification
Date: Tue, 05 Mar 2019 10:13:00 +0000
Received: from mx1.monkey.org (mx1.monkey.org [192.0.2.1]) by mail.monkey.org
Received: from snd.example.net ([173.221.126.99]) by mx1.monkey.org
MIME-Version: 1.0
Content-Type: text/html; charset=utf-8

<html><body>
<p>You received a files via WeTransfer.</p>
<p><a href="http://files-transfer.example.net/dl/81231">Get your files</a></p>
<p>2 files, 3.4 MB in total</p>
<p>About WeTransfer</p>
</body></html>
"""


@pytest.fixture(scope="session")
def wetransfer_record():
    from phishcode.mailparse import to_record

    raws = parse_mailbox(WETRANSFER_EML, fmt="eml", origin_path="wetransfer.eml")
    return to_record(raws[0], "2019_001")


def make_record(
    id="2015_001",
    date=None,
    sender_display="",
    sender_address="",
    subject="",
    body_text="",
    body_html=None,
    urls=(),
    has_attachment=False,
    transport=None,
    warnings=(),
):
    sender_domain = ""
    if "@" in sender_address:
        sender_domain = sender_address.rsplit("@", 1)[1].lower()
    return EmailRecord(
        id=id,
        date=date,
        sender_display=sender_display,
        sender_address=sender_address,
        sender_domain=sender_domain,
        subject=subject,
        body_text=body_text,
        body_html=body_html,
        urls=tuple(urls),
        has_attachment=has_attachment,
        transport=transport or TransportMeta(first_ip=None, received_count=0, dkim_present=False),
        warnings=tuple(warnings),
    )


def make_coded(
    email_id="2015_001",
    company=("none",),
    sector="unknown",
    salutation="none",
    threat="none",
    urgency="none",
    actions=frozenset({"none"}),
    specific=(),
    topic="",
    indirect=False,
):
    return CodedEmail(
        email_id=email_id,
        company_names=tuple(company),
        sector=sector,
        salutation=salutation,
        threat=threat,
        urgency=urgency,
        actions_generic=frozenset(actions),
        action_specific=tuple(specific),
        main_topic=topic,
        indirect_flag=indirect,
    )


def five_email_synthetic():
    """Two file-share lookalikes, two payment lookalikes, one odd one out:
    clusters to leaves of sizes 2, 2, 1."""
    return [
        make_coded(
            "2018_001",
            company=("wetransfer",),
            sector="document share",
            actions=frozenset({"download"}),
            specific=("get file",),
            topic="received file via wetransfer",
        ),
        make_coded(
            "2018_002",
            company=("wetransfer",),
            sector="document share",
            actions=frozenset({"download"}),
            specific=("get file",),
            topic="received file via wetransfer",
        ),
        make_coded(
            "2018_003",
            company=("paypal",),
            sector="financial",
            actions=frozenset({"click"}),
            specific=("verify account",),
            topic="account notice",
        ),
        make_coded(
            "2018_004",
            company=("paypal",),
            sector="financial",
            actions=frozenset({"click"}),
            specific=("verify account",),
            topic="account notice",
        ),
        make_coded(
            "2018_005",
            company=("usaa",),
            sector="financial",
            actions=frozenset({"click"}),
            specific=("update personal information",),
            topic="new security safeguard",
        ),
    ]


@pytest.fixture
def five_coded():
    return five_email_synthetic()


def utc(year, month, day, hour=12):
    return datetime(year, month, day, hour, tzinfo=timezone.utc)


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: acceptance criteria checks")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL/SKIP line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "skipped"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" not in nodeid:
                continue
            name = nodeid.split("::")[-1]
            status = outcome.upper().replace("PASSED", "PASS").replace("FAILED", "FAIL")
            status = {"PASSED": "PASS", "FAILED": "FAIL", "SKIPPED": "SKIP"}.get(
                outcome.upper(), outcome.upper()
            )
            reason = ""
            if outcome == "skipped" and report.longrepr:
                reason = f"  ({report.longrepr[-1]})"
            lines.append(f"{status:4s}  {name}{reason}")
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
