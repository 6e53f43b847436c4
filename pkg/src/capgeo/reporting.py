"""Report emission: JSON documents and CSV tables with a metadata header.

Every artifact carries version, a hash of the resolved run configuration,
and the date. CSV bodies are deterministic for a fixed config (the date
lives in its own header line so diffs ignore it); floats print with 12
significant digits.
"""

import csv
import hashlib
import io
import json
from datetime import datetime, timezone

import capgeo


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return f"{x:.12g}"
    return str(x)


def config_hash(config: dict) -> str:
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def metadata(config: dict) -> dict:
    return {
        "version": capgeo.__version__,
        "config_hash": config_hash(config),
        "date": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def write_json(path, payload: dict, config: dict):
    doc = {"meta": metadata(config), **payload}
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, default=_json_default)
        fh.write("\n")
    return path


def _json_default(obj):
    if hasattr(obj, "to_dict"):
        return obj.to_dict()
    if hasattr(obj, "tolist"):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)}")


def read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def write_csv(path, rows, columns, config: dict):
    """CSV with three comment header lines (version, config hash, date)."""
    meta = metadata(config)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    with open(path, "w") as fh:
        fh.write(f"# capgeo {meta['version']}\n")
        fh.write(f"# config {meta['config_hash']}\n")
        fh.write(f"# date {meta['date']}\n")
        fh.write(buf.getvalue())
    return path


def csv_body(path) -> str:
    """File content without the date header line, for determinism checks."""
    with open(path) as fh:
        lines = fh.readlines()
    return "".join(line for line in lines if not line.startswith("# date"))


def reports_to_rows(evaluations):
    """Flatten BodyEvaluation reports into summary CSV rows."""
    columns = [
        "body", "inequality", "n", "p", "q", "left", "right", "slack", "tol",
        "pass", "asserted",
    ]
    rows = []
    for ev in evaluations:
        for r in ev.reports:
            rows.append([
                r.body, r.inequality, r.n,
                "" if r.p is None else r.p,
                "" if r.q is None else r.q,
                r.left, r.right, r.slack, r.tol, r.passed, r.asserted,
            ])
    return rows, columns
