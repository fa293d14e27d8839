"""Deterministic file output: versioned CSV/JSON, manifests, config hashes.

All emitted files are byte-stable for identical configuration: floats are
written with repr (shortest round-trip), JSON keys are sorted, and nothing
time-dependent enters the payloads (timestamps go to the run log only).
"""

import hashlib
import json
import os

import numpy as np

FORMAT_VERSION = "1"

__all__ = ["FORMAT_VERSION", "write_csv", "write_json", "config_hash",
           "write_manifest", "profile_to_files", "append_log"]


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def write_csv(path, header, columns):
    """Write named columns (equal length sequences) as CSV."""
    cols = [np.asarray(c) for c in columns]
    n = len(cols[0])
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(n):
            fh.write(",".join(_fmt(c[i]) for c in cols) + "\n")
    return path


def _jsonready(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonready(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    return obj


def write_json(path, payload):
    payload = _jsonready(payload)
    payload.setdefault("format_version", FORMAT_VERSION)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def config_hash(config_dict):
    blob = json.dumps(_jsonready(config_dict), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def write_manifest(outdir, config_dict, outputs, extra=None):
    payload = {
        "config": _jsonready(config_dict),
        "config_hash": config_hash(config_dict),
        "outputs": sorted(os.path.basename(p) for p in outputs),
    }
    if extra:
        payload.update(_jsonready(extra))
    return write_json(os.path.join(outdir, "manifest.json"), payload)


def append_log(outdir, message):
    """Timestamps are quarantined here, away from deterministic outputs."""
    import datetime

    with open(os.path.join(outdir, "run.log"), "a") as fh:
        fh.write(f"{datetime.datetime.now().isoformat()} {message}\n")


def profile_to_files(profile, outdir, stem, region_tag=None, meta=None):
    """Profile CSV (spec header) plus JSON sidecar; returns the paths."""
    os.makedirs(outdir, exist_ok=True)
    tags = region_tag if region_tag is not None else ["shrinker"] * profile.s.size
    csv_path = os.path.join(outdir, f"{stem}.csv")
    write_csv(csv_path,
              ["s", "x", "r", "tx", "tr", "nux", "nur", "H", "A2", "residual", "region_tag"],
              [profile.s, profile.x, profile.r, profile.tx, profile.tr,
               profile.nux, profile.nur, profile.H, profile.A2,
               profile.shrinker_residual, tags])
    sidecar = dict(profile.summary())
    if meta:
        sidecar.update(meta)
    json_path = write_json(os.path.join(outdir, f"{stem}.json"), sidecar)
    return csv_path, json_path
