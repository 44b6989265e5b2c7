"""Regenerate the bundled corpus and replay fixtures.

    python tools/build_fixtures.py

The outputs are committed; rerunning must reproduce them byte for byte.
Replay outputs start from the reference serialization of each expected value
and are then damaged in the ways completions typically go wrong (code fences,
dropped fields, wrong values, miscounted TOON arrays, bad indentation).
"""

from __future__ import annotations

import random
import re
from datetime import datetime, timedelta, timezone
from pathlib import Path

from toonbench.formats import FormatKind, serialize_format
from toonbench.harness.corpus import TaskInstance, corpus_line
from toonbench.harness.prompts import build_prompt, default_templates
from toonbench.harness.records import GenerationRecord, write_records
from toonbench.sustainability import DecodeMeasurement
from toonbench.value import from_python

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "toonbench" / "fixtures"
MODEL_ID = "replay-8b-instruct"
SEED = 20240611
ALL_FORMATS = (FormatKind.JSON, FormatKind.XML, FormatKind.YAML, FormatKind.TOON)

# kgCO2e per 1000 generated tokens, before jitter
CE_RATE = {
    FormatKind.JSON: 0.000138,
    FormatKind.XML: 0.000161,
    FormatKind.YAML: 0.000122,
    FormatKind.TOON: 0.0000352,
}
TOKENS_PER_S = {FormatKind.JSON: 41.0, FormatKind.XML: 38.5, FormatKind.YAML: 43.0, FormatKind.TOON: 46.5}
GRID_KG_PER_KWH = 0.4

INSTANCES = [
    ("users-table", "List two users with integer id, name and role: Alice (admin) and Bob (viewer).",
     {"team": {"users": [{"id": 1, "name": "Alice", "role": "admin"}, {"id": 2, "name": "Bob", "role": "viewer"}]}}),
    ("inventory", "Describe a warehouse inventory with three items (sku, qty, price) and the warehouse code W-17.",
     {"inventory": {"warehouse": "W-17", "items": [
         {"sku": "A100", "qty": 12, "price": 3.5},
         {"sku": "B220", "qty": 0, "price": 12.25},
         {"sku": "C310", "qty": 48, "price": 0.99}]}}),
    ("service-config", "Write a service configuration: name api-gateway, port 8443, TLS enabled with cert path "
     "/etc/tls/gw.pem, and a retry policy of 3 attempts with 250 ms base delay.",
     {"service": {"name": "api-gateway", "port": 8443,
                  "tls": {"enabled": True, "cert": "/etc/tls/gw.pem"},
                  "retry": {"attempts": 3, "base_delay_ms": 250}}}),
    ("order", "Create an order record: id ORD-5521, customer 907, two line items, total 57.4, status shipped.",
     {"order": {"id": "ORD-5521", "customer": 907, "status": "shipped", "total": 57.4,
                "lines": [{"product": "cable", "qty": 2, "unit": 8.7}, {"product": "hub", "qty": 1, "unit": 40}]}}),
    ("weather", "Report a 3-day forecast for Oslo with date, high and low temperatures in Celsius.",
     {"forecast": {"city": "Oslo", "days": [
         {"date": "2024-03-01", "high": 4, "low": -3},
         {"date": "2024-03-02", "high": 6, "low": -1},
         {"date": "2024-03-03", "high": 3, "low": -5}]}}),
    ("library", "Catalogue four books with title, author and publication year.",
     {"catalog": {"books": [
         {"title": "Dune", "author": "Frank Herbert", "year": 1965},
         {"title": "Neuromancer", "author": "William Gibson", "year": 1984},
         {"title": "Hyperion", "author": "Dan Simmons", "year": 1989},
         {"title": "Solaris", "author": "Stanislaw Lem", "year": 1961}]}}),
    ("employee", "Give an employee profile with name, department, manager flag, skills list and an address.",
     {"employee": {"name": "Grace Ho", "department": "Platform", "manager": False,
                   "skills": ["go", "sql", "terraform"],
                   "address": {"city": "Lisbon", "zip": "1100-148"}}}),
    ("events", "Log three audit events with timestamp, actor and action.",
     {"audit": {"events": [
         {"ts": "2024-05-02T09:14:00Z", "actor": "svc-deploy", "action": "release"},
         {"ts": "2024-05-02T09:20:31Z", "actor": "jlee", "action": "rollback"},
         {"ts": "2024-05-02T10:02:07Z", "actor": "svc-deploy", "action": "release"}]}}),
    ("tags", "Return a document with title Quarterly Review, tags finance, q3 and internal, and page count 14.",
     {"document": {"title": "Quarterly Review", "tags": ["finance", "q3", "internal"], "pages": 14}}),
    ("server-status", "Summarize cluster health: cluster eu-west, two nodes with name, cpu load and healthy flag, "
     "and an alert count.",
     {"cluster": {"name": "eu-west", "alerts": 2, "nodes": [
         {"name": "node-a", "load": 0.72, "healthy": True},
         {"name": "node-b", "load": 0.95, "healthy": False}]}}),
    ("recipe", "Write a pancake recipe with servings, three ingredients (item, amount, unit) and two steps.",
     {"recipe": {"name": "pancakes", "servings": 4,
                 "ingredients": [{"item": "flour", "amount": 200, "unit": "g"},
                                 {"item": "milk", "amount": 300, "unit": "ml"},
                                 {"item": "egg", "amount": 2, "unit": "pcs"}],
                 "steps": ["whisk everything", "fry in a hot pan"]}}),
    ("project", "Describe a project with key, owner, budget, milestone list (name, due) and an active flag.",
     {"project": {"key": "ATLAS", "owner": "mkaur", "budget": 125000, "active": True,
                  "milestones": [{"name": "design", "due": "2024-07-01"}, {"name": "beta", "due": "2024-09-15"}]}}),
]


# -- damage -----------------------------------------------------------------


def fence(tag=""):
    return lambda text: f"```{tag}\n{text}\n```"


def replace(old, new, count=1):
    def apply(text):
        if old not in text:
            raise AssertionError(f"fixture edit target {old!r} not found")
        return text.replace(old, new, count)
    return apply


def drop_line(pattern):
    rx = re.compile(pattern)

    def apply(text):
        lines = text.split("\n")
        hits = [i for i, ln in enumerate(lines) if rx.search(ln)]
        if not hits:
            raise AssertionError(f"fixture line {pattern!r} not found")
        del lines[hits[0]]
        return "\n".join(lines)
    return apply


def prose(text):
    return "Here is the requested data:\n" + text


def truncate(frac):
    return lambda text: text[: int(len(text) * frac)]


J, X, Y, T = FormatKind.JSON, FormatKind.XML, FormatKind.YAML, FormatKind.TOON

DAMAGE = {
    ("inventory", J): [fence("json")],
    ("service-config", T): [replace("port: 8443", "port: 443")],
    ("order", T): [replace("lines[2]", "lines[3]")],
    ("weather", T): [fence("toon")],
    ("library", J): [replace(',"year":1984', "")],
    ("library", T): [replace("Hyperion,Dan Simmons,1989", "Hyperion,Dan Simmons")],
    ("employee", T): [drop_line(r"^\s+zip:")],
    ("events", J): [prose],
    ("server-status", J): [replace('"alerts":2', '"alerts":3')],
    ("server-status", T): [replace("  nodes[2]", "   nodes[2]")],
    ("recipe", T): [replace("milk,300,ml", "milk,250,ml")],
    ("recipe", X): [truncate(0.8)],
    ("tags", Y): [replace("pages: 14", "page_count: 14")],
    ("project", X): [fence("xml")],
}


def token_count(text: str) -> int:
    # crude word/punctuation split; enough to make sizes format-sensitive
    return len(re.findall(r"[A-Za-z0-9_]+|[^\sA-Za-z0-9_]", text))


def main():
    rng = random.Random(SEED)
    templates = default_templates()
    corpus = [TaskInstance(iid, desc, from_python(exp), ALL_FORMATS) for iid, desc, exp in INSTANCES]
    FIXTURES.mkdir(parents=True, exist_ok=True)
    (FIXTURES / "corpus.jsonl").write_text("".join(corpus_line(t) + "\n" for t in corpus), encoding="utf-8")

    t0 = datetime(2024, 6, 11, 9, 0, tzinfo=timezone.utc)
    records = []
    for inst in corpus:
        for fmt in ALL_FORMATS:
            text = serialize_format(inst.expected, fmt)
            for edit in DAMAGE.get((inst.instance_id, fmt), ()):
                text = edit(text)
            n = token_count(text)
            rate = CE_RATE[fmt] * (1 + rng.uniform(-0.12, 0.12))
            ce = float(f"{rate * n / 1000:.6g}")
            duration = round(n / (TOKENS_PER_S[fmt] * (1 + rng.uniform(-0.1, 0.1))), 3)
            stamp = t0 + timedelta(seconds=len(records) * 7)
            records.append(
                GenerationRecord(
                    instance_id=inst.instance_id,
                    model_id=MODEL_ID,
                    format=fmt,
                    prompt=build_prompt(inst, fmt, templates),
                    output_text=text,
                    measurement=DecodeMeasurement(
                        n_tokens=n,
                        duration_s=duration,
                        energy_kwh=float(f"{ce / GRID_KG_PER_KWH:.6g}"),
                        ce_kg=ce,
                    ),
                    timestamp=stamp.isoformat(timespec="milliseconds").replace("+00:00", "Z"),
                    duration_mode="decode",
                    sampling={"temperature": 0.0},
                )
            )
    write_records(FIXTURES / "replay.jsonl", records)
    print(f"{len(corpus)} instances, {len(records)} replay records -> {FIXTURES}")


if __name__ == "__main__":
    main()
