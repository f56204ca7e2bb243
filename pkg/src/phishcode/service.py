"""HTTP API for the human coding workflow.

A single store guards all mutation behind one lock and persists every
accepted annotation to an append-only journal that is replayed on startup;
reads work from snapshots. Auth is one shared token per coder: requests
carry X-Coder-Token and must match the token registered for the coder they
act as (research-tool grade, not a hardened service).
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from io import StringIO
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Header, Query, Request
from fastapi.responses import JSONResponse, PlainTextResponse
from pydantic import BaseModel

from phishcode.agreement import AnnotationSet, agreement_report
from phishcode.autocoder import code_email
from phishcode.campaigns import cluster_multilayer
from phishcode.codebook import (
    CodebookSchema,
    CodedEmail,
    coded_from_dict,
    coded_to_dict,
    validate_coded,
    write_coded_csv,
)
from phishcode.lexicons import load_lexicons
from phishcode.records import EmailRecord, record_to_dict


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.violations = violations or []


@dataclass
class AnnotationStore:
    journal_path: Path
    coders: dict[str, str]
    recipient_name: str = ""
    recipient_address: str = ""
    lexicon_dir: Optional[str] = None
    gazetteer_path: Optional[str] = None
    schema: CodebookSchema = field(default_factory=CodebookSchema)

    def __post_init__(self):
        self._lock = threading.Lock()
        self._emails: dict[str, EmailRecord] = {}
        self._annotations: dict[tuple[str, str], tuple[CodedEmail, float]] = {}
        self._lexicons = load_lexicons(self.lexicon_dir, gazetteer=self.gazetteer_path)
        self.journal_path = Path(self.journal_path)
        self._replay()

    # -- persistence ------------------------------------------------------

    def _replay(self) -> None:
        if not self.journal_path.is_file():
            return
        with open(self.journal_path, encoding="utf-8") as fp:
            for line in fp:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                if entry.get("op") == "annotate":
                    coded = coded_from_dict(entry["coded"])
                    key = (entry["coder_id"], coded.email_id)
                    self._annotations[key] = (coded, float(entry["ts"]))

    def _journal(self, entry: dict) -> None:
        self.journal_path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.journal_path, "a", encoding="utf-8") as fp:
            fp.write(json.dumps(entry, sort_keys=True))
            fp.write("\n")

    # -- operations -------------------------------------------------------

    def load_emails(self, records: list[EmailRecord]) -> None:
        with self._lock:
            for rec in records:
                self._emails[rec.id] = rec

    def authenticate(self, coder_id: str, token: Optional[str]) -> None:
        if coder_id not in self.coders:
            raise ServiceError(401, "unknown-coder", f"unknown coder: {coder_id}")
        if self.coders[coder_id] != (token or ""):
            raise ServiceError(401, "bad-token", "coder token mismatch")

    def next_email(self, coder_id: str) -> Optional[tuple[EmailRecord, CodedEmail]]:
        with self._lock:
            done = {email_id for (cid, email_id) in self._annotations if cid == coder_id}
            pending = sorted(set(self._emails) - done)
            if not pending:
                return None
            record = self._emails[pending[0]]
        suggestion = code_email(
            record,
            self._lexicons,
            self.schema,
            recipient_name=self.recipient_name,
            recipient_address=self.recipient_address,
        )
        return record, suggestion

    def submit(self, coder_id: str, coded: CodedEmail) -> tuple[CodedEmail, float]:
        violations = validate_coded(coded, self.schema)
        if violations:
            raise ServiceError(422, "invalid-annotation", "annotation failed validation", violations)
        with self._lock:
            if coded.email_id not in self._emails:
                raise ServiceError(404, "unknown-email", f"unknown email id: {coded.email_id}")
            ts = time.time()
            self._annotations[(coder_id, coded.email_id)] = (coded, ts)
            self._journal(
                {"op": "annotate", "coder_id": coder_id, "coded": coded_to_dict(coded), "ts": ts}
            )
        return coded, ts

    def annotations_for(self, coder_id: str) -> list[CodedEmail]:
        with self._lock:
            items = [
                (email_id, coded)
                for (cid, email_id), (coded, _) in self._annotations.items()
                if cid == coder_id
            ]
        return [coded for _, coded in sorted(items)]

    def latest_annotations(self) -> list[CodedEmail]:
        with self._lock:
            newest: dict[str, tuple[CodedEmail, float]] = {}
            for (_, email_id), (coded, ts) in self._annotations.items():
                if email_id not in newest or ts >= newest[email_id][1]:
                    newest[email_id] = (coded, ts)
        return [coded for coded, _ in (newest[k] for k in sorted(newest))]

    def email_index(self) -> dict[str, EmailRecord]:
        with self._lock:
            return dict(self._emails)


class AnnotationIn(BaseModel):
    coder_id: str
    coded: dict


def create_app(store: AnnotationStore) -> FastAPI:
    app = FastAPI(title="phishcode annotation service")

    @app.exception_handler(ServiceError)
    async def _service_error(request: Request, exc: ServiceError):
        return JSONResponse(
            status_code=exc.status,
            content={"code": exc.code, "message": exc.message, "violations": exc.violations},
        )

    @app.get("/api/schema")
    def get_schema():
        return {
            "sectors": list(store.schema.sectors),
            "salutations": list(store.schema.salutations),
            "threat_values": list(store.schema.threat_values),
            "urgency_values": list(store.schema.urgency_values),
            "actions": list(store.schema.actions),
        }

    @app.get("/api/emails/next")
    def get_next(coder: str, x_coder_token: Optional[str] = Header(default=None)):
        store.authenticate(coder, x_coder_token)
        nxt = store.next_email(coder)
        if nxt is None:
            return {"done": True, "email": None, "suggestion": None}
        record, suggestion = nxt
        return {
            "done": False,
            "email": record_to_dict(record),
            "suggestion": coded_to_dict(suggestion),
        }

    @app.post("/api/annotations")
    def post_annotation(body: AnnotationIn, x_coder_token: Optional[str] = Header(default=None)):
        store.authenticate(body.coder_id, x_coder_token)
        try:
            coded = coded_from_dict(body.coded)
        except (KeyError, TypeError) as exc:
            raise ServiceError(422, "malformed-annotation", f"bad annotation payload: {exc}")
        stored, ts = store.submit(body.coder_id, coded)
        return {"stored": True, "timestamp": ts, "coded": coded_to_dict(stored)}

    def _pair_sets(a: str, b: str) -> tuple[AnnotationSet, AnnotationSet]:
        for coder in (a, b):
            if coder not in store.coders:
                raise ServiceError(401, "unknown-coder", f"unknown coder: {coder}")
        return (
            AnnotationSet.from_coded(a, store.annotations_for(a)),
            AnnotationSet.from_coded(b, store.annotations_for(b)),
        )

    @app.get("/api/agreement")
    def get_agreement(a: str, b: str):
        set_a, set_b = _pair_sets(a, b)
        try:
            report = agreement_report(set_a, set_b)
        except ValueError:
            return {"empty": True, "message": "no shared annotated emails"}
        return json.loads(report.to_json()) | {"empty": False}

    @app.get("/api/disagreements")
    def get_disagreements(a: str, b: str):
        set_a, set_b = _pair_sets(a, b)
        out = []
        for code in set_a.labels:
            la = set_a.labels[code]
            lb = set_b.labels.get(code, {})
            for email_id in sorted(set(la) & set(lb)):
                if la[email_id] != lb[email_id]:
                    out.append(
                        {"email_id": email_id, "code": code, "a": la[email_id], "b": lb[email_id]}
                    )
        return {"disagreements": out}

    @app.get("/api/export")
    def get_export(format: str = Query("jsonl"), coder: Optional[str] = None):
        if coder is not None:
            if coder not in store.coders:
                raise ServiceError(401, "unknown-coder", f"unknown coder: {coder}")
            coded = store.annotations_for(coder)
        else:
            coded = store.latest_annotations()
        if format == "csv":
            buf = StringIO()
            write_coded_csv(coded, buf)
            return PlainTextResponse(buf.getvalue(), media_type="text/csv")
        if format == "jsonl":
            lines = [json.dumps(coded_to_dict(c), sort_keys=True, ensure_ascii=False) for c in coded]
            return PlainTextResponse("\n".join(lines) + ("\n" if lines else ""), media_type="application/jsonl")
        raise ServiceError(400, "bad-format", f"unknown export format: {format}")

    @app.get("/api/clusters")
    def get_clusters(matcher: str = "exact", threshold: int = 5):
        if matcher not in ("exact", "lev"):
            raise ServiceError(400, "bad-matcher", f"unknown matcher: {matcher}")
        coded = store.latest_annotations()
        if not coded:
            return {"leaves": []}
        result = cluster_multilayer(
            coded,
            matcher="levenshtein" if matcher == "lev" else "exact",
            lev_threshold=threshold,
        )
        return {
            "leaves": [
                {
                    "sector": cl.key.sector,
                    "action_set": cl.key.action_set,
                    "company": cl.key.company,
                    "topic": cl.key.topic,
                    "action_specific": cl.key.action_specific,
                    "members": list(cl.member_ids),
                }
                for cl in result.leaves
            ]
        }

    return app
