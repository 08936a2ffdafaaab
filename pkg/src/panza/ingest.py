"""Mailbox ingestion: parse mbox/CSV archives into a cleaned, split corpus.

The JSONL corpus written here (one email object per line with fields
id/subject/body/sent_at/split) is the contract consumed by every
downstream stage.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import random
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from email import message_from_bytes
from email.utils import parsedate_to_datetime
from typing import Optional

SPLIT_TRAIN = "train"
SPLIT_TEST = "test"
SPLIT_UNASSIGNED = "unassigned"

_QUOTE_HEADER_RE = re.compile(r"^On .+ wrote:\s*$")


class IngestError(Exception):
    pass


class MboxFramingError(IngestError):
    def __init__(self, offset: int, detail: str):
        super().__init__(f"malformed mbox framing at byte offset {offset}: {detail}")
        self.offset = offset


class RulesError(IngestError):
    pass


@dataclass
class Email:
    id: str
    subject: str
    body: str
    sent_at: Optional[datetime] = None
    split: str = SPLIT_UNASSIGNED

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "subject": self.subject,
            "body": self.body,
            "sent_at": self.sent_at.isoformat() if self.sent_at else None,
            "split": self.split,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Email":
        sent_at = obj.get("sent_at")
        return cls(
            id=obj["id"],
            subject=obj.get("subject", ""),
            body=obj["body"],
            sent_at=datetime.fromisoformat(sent_at) if sent_at else None,
            split=obj.get("split", SPLIT_UNASSIGNED),
        )


@dataclass
class CleaningRules:
    strip_quoted_replies: bool = True
    strip_signatures: bool = True
    substitutions: list = field(default_factory=list)  # ordered (pattern, replacement)
    min_body_tokens: int = 0

    def __post_init__(self):
        if self.min_body_tokens < 0:
            raise RulesError("min_body_tokens must be >= 0")
        self._compiled = []
        for pattern, repl in self.substitutions:
            try:
                self._compiled.append((re.compile(pattern), repl))
            except re.error as exc:
                raise RulesError(f"invalid substitution pattern {pattern!r}: {exc}") from exc

    @classmethod
    def from_json(cls, obj: dict) -> "CleaningRules":
        return cls(
            strip_quoted_replies=obj.get("strip_quoted_replies", True),
            strip_signatures=obj.get("strip_signatures", True),
            substitutions=[tuple(s) for s in obj.get("substitutions", [])],
            min_body_tokens=obj.get("min_body_tokens", 0),
        )


def _email_id(subject: str, body: str) -> str:
    h = hashlib.sha256()
    h.update(subject.encode("utf-8"))
    h.update(b"\x00")
    h.update(body.encode("utf-8"))
    return h.hexdigest()[:16]


def _first_text_plain(msg) -> Optional[str]:
    parts = msg.walk() if msg.is_multipart() else [msg]
    for part in parts:
        if part.get_content_type() != "text/plain":
            continue
        payload = part.get_payload(decode=True)
        if payload is None:
            continue
        charset = part.get_content_charset() or "utf-8"
        try:
            return payload.decode(charset, errors="replace")
        except LookupError:
            return payload.decode("utf-8", errors="replace")
    return None


def _parse_date(msg) -> Optional[datetime]:
    raw = msg.get("Date")
    if not raw:
        return None
    try:
        dt = parsedate_to_datetime(raw)
    except (TypeError, ValueError):
        return None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc)


def _split_mbox_messages(data: bytes) -> list[tuple[int, bytes]]:
    """Split an RFC 4155 mbox into (offset, raw message) chunks."""
    if not data.startswith(b"From "):
        raise MboxFramingError(0, "expected 'From ' separator line")
    offsets = [0]
    pos = 0
    while True:
        nxt = data.find(b"\nFrom ", pos)
        if nxt == -1:
            break
        offsets.append(nxt + 1)
        pos = nxt + 1
    chunks = []
    for i, off in enumerate(offsets):
        end = offsets[i + 1] - 1 if i + 1 < len(offsets) else len(data)
        chunk = data[off:end]
        eol = chunk.find(b"\n")
        if eol == -1:
            raise MboxFramingError(off, "separator line not terminated")
        chunks.append((off, chunk[eol + 1 :]))
    return chunks


def _looks_like_csv(data: bytes) -> bool:
    head = data.lstrip()[:2048].split(b"\n", 1)[0]
    return not head.startswith(b"From ") and b"," in head


def parse_mbox(data: bytes) -> tuple[list[Email], list[dict]]:
    """Parse an mbox (or two-column subject,body CSV) into Emails.

    Returns (emails, skip_report); messages without a decodable text/plain
    part and exact duplicates are skipped and reported, not fatal.
    """
    if not data.strip():
        return [], []
    if _looks_like_csv(data):
        return _parse_csv(data)

    emails: list[Email] = []
    skipped: list[dict] = []
    seen_ids: set[str] = set()
    for offset, raw in _split_mbox_messages(data):
        msg = message_from_bytes(raw)
        body = _first_text_plain(msg)
        if body is None:
            skipped.append({"offset": offset, "reason": "no decodable text/plain part"})
            continue
        body = body.replace("\r\n", "\n").replace("\r", "\n")
        subject = str(msg.get("Subject", "") or "")
        eid = _email_id(subject, body)
        if eid in seen_ids:
            skipped.append({"offset": offset, "reason": "duplicate"})
            continue
        seen_ids.add(eid)
        emails.append(Email(id=eid, subject=subject, body=body, sent_at=_parse_date(msg)))
    return emails, skipped


def _parse_csv(data: bytes) -> tuple[list[Email], list[dict]]:
    text = data.decode("utf-8")
    reader = csv.reader(io.StringIO(text))
    rows = [r for r in reader if r]
    if rows and [c.strip().lower() for c in rows[0][:2]] == ["subject", "body"]:
        rows = rows[1:]
    emails: list[Email] = []
    skipped: list[dict] = []
    seen_ids: set[str] = set()
    for i, row in enumerate(rows):
        if len(row) < 2:
            skipped.append({"offset": i, "reason": "expected two columns (subject, body)"})
            continue
        subject, body = row[0], row[1]
        body = body.replace("\r\n", "\n").replace("\r", "\n")
        eid = _email_id(subject, body)
        if eid in seen_ids:
            skipped.append({"offset": i, "reason": "duplicate"})
            continue
        seen_ids.add(eid)
        emails.append(Email(id=eid, subject=subject, body=body))
    return emails, skipped


def clean(email: Email, rules: CleaningRules) -> Optional[Email]:
    """Apply cleaning rules; returns None when the email is dropped."""
    lines = email.body.split("\n")
    if rules.strip_quoted_replies:
        lines = [
            ln
            for ln in lines
            if not ln.startswith(">") and not _QUOTE_HEADER_RE.match(ln)
        ]
    if rules.strip_signatures:
        for i, ln in enumerate(lines):
            if ln.rstrip() == "--":
                lines = lines[:i]
                break
    body = "\n".join(lines).strip()
    for pattern, repl in rules._compiled:
        body = pattern.sub(repl, body)
    if not body:
        return None
    if rules.min_body_tokens and len(body.split()) < rules.min_body_tokens:
        return None
    return replace(email, body=body)


def clean_corpus(emails: list[Email], rules: CleaningRules) -> tuple[list[Email], int]:
    kept = []
    for email in emails:
        cleaned = clean(email, rules)
        if cleaned is not None:
            kept.append(cleaned)
    # anonymization totality: no substitution pattern may survive cleaning
    for pattern, _ in rules._compiled:
        for email in kept:
            if pattern.search(email.body):
                raise RulesError(
                    f"substitution pattern {pattern.pattern!r} still matches "
                    f"email {email.id} after cleaning"
                )
    return kept, len(emails) - len(kept)


def split_dataset(corpus: list[Email], train_fraction: float, seed: int) -> list[Email]:
    """Assign train/test splits by a seeded uniform shuffle.

    Exactly floor(n * train_fraction) emails are marked train; deterministic
    under (corpus order, seed).
    """
    if not 0 < train_fraction < 1:
        raise IngestError("train_fraction must be in (0, 1)")
    n = len(corpus)
    if n < 2:
        raise IngestError("corpus must contain at least 2 emails to split")
    n_train = int(n * train_fraction)
    if n_train == 0 or n_train == n:
        raise IngestError("train_fraction leaves one split empty")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    train_idx = set(order[:n_train])
    return [
        replace(e, split=SPLIT_TRAIN if i in train_idx else SPLIT_TEST)
        for i, e in enumerate(corpus)
    ]


def write_corpus(emails: list[Email], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in emails:
            fh.write(json.dumps(e.to_json(), ensure_ascii=False) + "\n")


def read_corpus(path) -> list[Email]:
    emails = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                emails.append(Email.from_json(json.loads(line)))
    return emails
