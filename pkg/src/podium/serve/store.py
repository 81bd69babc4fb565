"""Embedded document store with write-ahead durability.

sqlite in WAL mode, one documents table keyed by (kind, id) with JSON
bodies stored as the exact text written, plus an append-only usage
event log. Documents are immutable: writing an existing key is an
error, and reads return the stored body byte for byte.
"""

from __future__ import annotations

import json
import sqlite3
import threading
from pathlib import Path

from podium.errors import NotFoundError, ValidationError

_SCHEMA = """
CREATE TABLE IF NOT EXISTS documents (
    kind TEXT NOT NULL,
    id TEXT NOT NULL,
    body TEXT NOT NULL,
    created REAL NOT NULL,
    PRIMARY KEY (kind, id)
);
CREATE TABLE IF NOT EXISTS events (
    seq INTEGER PRIMARY KEY AUTOINCREMENT,
    learner_id TEXT NOT NULL,
    kind TEXT NOT NULL,
    ts REAL NOT NULL,
    duration_s REAL NOT NULL DEFAULT 0
);
CREATE INDEX IF NOT EXISTS idx_events_learner ON events (learner_id, ts);
"""

EVENT_KINDS = ("dashboard_view", "tutor_message", "upload", "report_fetch")


class Store:
    def __init__(self, path=":memory:"):
        self.path = str(path)
        if self.path != ":memory:":
            Path(self.path).parent.mkdir(parents=True, exist_ok=True)
        self._conn = sqlite3.connect(self.path, check_same_thread=False)
        self._lock = threading.Lock()
        with self._lock:
            self._conn.execute("PRAGMA journal_mode=WAL")
            self._conn.execute("PRAGMA synchronous=NORMAL")
            self._conn.executescript(_SCHEMA)
            self._conn.commit()

    def close(self) -> None:
        self._conn.close()

    # ------------------------------------------------------------ documents

    def put(self, kind: str, doc_id: str, body: dict | str, created: float = 0.0) -> None:
        text = body if isinstance(body, str) else json.dumps(body, sort_keys=True)
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT INTO documents (kind, id, body, created) VALUES (?, ?, ?, ?)",
                    (kind, doc_id, text, created),
                )
            except sqlite3.IntegrityError:
                raise ValidationError(f"{kind}/{doc_id} already stored; documents are immutable")
            self._conn.commit()

    def get_text(self, kind: str, doc_id: str) -> str:
        with self._lock:
            row = self._conn.execute(
                "SELECT body FROM documents WHERE kind = ? AND id = ?", (kind, doc_id)
            ).fetchone()
        if row is None:
            raise NotFoundError(f"no {kind} with id {doc_id!r}")
        return row[0]

    def get(self, kind: str, doc_id: str) -> dict:
        return json.loads(self.get_text(kind, doc_id))

    def exists(self, kind: str, doc_id: str) -> bool:
        with self._lock:
            row = self._conn.execute(
                "SELECT 1 FROM documents WHERE kind = ? AND id = ?", (kind, doc_id)
            ).fetchone()
        return row is not None

    def list_ids(self, kind: str) -> list[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT id FROM documents WHERE kind = ? ORDER BY created, id", (kind,)
            ).fetchall()
        return [r[0] for r in rows]

    def list_docs(self, kind: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT body FROM documents WHERE kind = ? ORDER BY created, id", (kind,)
            ).fetchall()
        return [json.loads(r[0]) for r in rows]

    # --------------------------------------------------------------- events

    def append_event(self, learner_id: str, kind: str, ts: float, duration_s: float = 0.0) -> None:
        if kind not in EVENT_KINDS:
            raise ValidationError(f"unknown event kind {kind!r}")
        with self._lock:
            self._conn.execute(
                "INSERT INTO events (learner_id, kind, ts, duration_s) VALUES (?, ?, ?, ?)",
                (learner_id, kind, ts, duration_s),
            )
            self._conn.commit()

    def events_for(self, learner_id: str) -> list[dict]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT kind, ts, duration_s FROM events WHERE learner_id = ? ORDER BY seq",
                (learner_id,),
            ).fetchall()
        return [{"kind": k, "ts": t, "duration_s": d} for k, t, d in rows]

    def learners_with_events(self) -> list[str]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT DISTINCT learner_id FROM events ORDER BY learner_id"
            ).fetchall()
        return [r[0] for r in rows]
