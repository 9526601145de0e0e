"""Run manifests and atomic output writing.

Every CLI output artifact gets a sidecar `<name>.manifest.json` recording
the command line, a hash of the effective configuration, digests of the
input files, the seed, the tool version, and timestamps. Outputs are
written to a temp file in the destination directory and renamed into place.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import time

from . import __version__


def file_digest(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()


def build_manifest(argv, inputs, seed=None, config=None, started=None):
    return {
        "command_line": list(argv),
        "config_hash": config_hash(config or {}),
        "inputs": {str(p): file_digest(p) for p in inputs},
        "seed": seed,
        "version": __version__,
        "started": started,
        "finished": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }


def atomic_write_text(path, text):
    path = str(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_manifest(out_path, manifest):
    atomic_write_text(str(out_path) + ".manifest.json",
                      json.dumps(manifest, indent=2, sort_keys=True) + "\n")
