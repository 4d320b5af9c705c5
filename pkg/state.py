import hashlib
import json
import logging
import os
import sqlite3
from datetime import datetime, timezone
from typing import Mapping, Optional

import config  # type: ignore
from geometry import WeightEstimate
from graphs import KGraph, render


log = logging.getLogger(__name__)

_DDL = """
CREATE TABLE IF NOT EXISTS mc_estimates (
  key TEXT PRIMARY KEY,     -- sha256 of the run parameters
  graph TEXT,
  samples INTEGER,
  seed INTEGER,
  value REAL,
  stderr REAL,
  created_at TEXT
);
"""


def _conn(path: str):
    folder = os.path.dirname(os.path.abspath(path))
    os.makedirs(folder, exist_ok=True)
    conn = sqlite3.connect(path)
    conn.execute("PRAGMA journal_mode=WAL;")
    return conn


def init_db(path: str):
    with _conn(path) as c:
        c.execute(_DDL)


def run_key(
    g: KGraph,
    samples: int,
    seed: int,
    ordered: bool,
    fixed: Optional[Mapping[str, float]],
    fiber: bool,
    batches: int,
    uniform_share: float = config.MC_UNIFORM_SHARE,
) -> str:
    payload = json.dumps(
        {
            "graph": render(g),
            "samples": samples,
            "seed": seed,
            "ordered": ordered,
            "fixed": sorted((k, repr(float(v))) for k, v in (fixed or {}).items()),
            "fiber": fiber,
            "batches": batches,
            "uniform_share": repr(float(uniform_share)),
        },
        sort_keys=True,
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def get_estimate(path: str, key: str) -> Optional[WeightEstimate]:
    with _conn(path) as c:
        cur = c.execute("SELECT value, stderr, samples, seed FROM mc_estimates WHERE key=?", (key,))
        row = cur.fetchone()
    if row is None:
        return None
    value, stderr, samples, seed = row
    if value is None or stderr is None:
        log.warning(f"cache row {key[:12]} is incomplete; ignoring it")
        return None
    return WeightEstimate(value=value, stderr=stderr, samples=samples, seed=seed)


def put_estimate(path: str, key: str, g: KGraph, est: WeightEstimate):
    now = datetime.now(timezone.utc).isoformat()
    with _conn(path) as c:
        c.execute(
            """
            INSERT INTO mc_estimates(key, graph, samples, seed, value, stderr, created_at)
            VALUES(?,?,?,?,?,?,?)
            ON CONFLICT(key) DO UPDATE SET
              value=excluded.value,
              stderr=excluded.stderr,
              created_at=excluded.created_at
            """,
            (key, render(g), est.samples, est.seed, est.value, est.stderr, now),
        )
