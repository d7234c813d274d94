"""Run artifacts: config files, JSON/CSV serialization, and the run manifest.

Config files are flat "dotted.key = value" lines; values are python literals
(numbers, lists, quoted strings) with bare words falling back to strings.
All floats are written with 17 significant digits so that reruns can be
compared byte for byte.
"""

from __future__ import annotations

import ast
import hashlib
import json
import time
from pathlib import Path


def fmt17(v: float) -> str:
    """17 significant digits, round-trip exact for doubles."""
    if v != v:
        return "nan"
    if v in (float("inf"), float("-inf")):
        return "inf" if v > 0 else "-inf"
    return format(float(v), ".17g")


def dump_json17(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits and sorted keys."""
    pad = " " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for k in sorted(obj, key=str):
            items.append(f'{pad}  {json.dumps(str(k))}: {dump_json17(obj[k], indent + 2)}')
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad}  {dump_json17(v, indent + 2)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return fmt17(obj)
    if isinstance(obj, int):
        return str(obj)
    return json.dumps(obj)


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.write_text(dump_json17(obj) + "\n")
    return path


def write_csv(path: Path, header, rows) -> Path:
    """CSV with 17-significant-digit floats; no quoting is ever needed here."""
    path = Path(path)
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt17(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def parse_value(text: str):
    text = text.strip()
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        pass
    if "," in text:
        parts = [p.strip() for p in text.split(",") if p.strip()]
        try:
            return [ast.literal_eval(p) for p in parts]
        except (ValueError, SyntaxError):
            return parts
    return text


def parse_config_file(path) -> dict:
    """Flat dotted-key config: one "key = value" per line, # comments."""
    out = {}
    for ln, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if not key:
            raise ValueError(f"{path}:{ln}: empty key")
        if key in out:
            raise ValueError(f"{path}:{ln}: duplicate key {key!r}")
        out[key] = parse_value(val)
    return out


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunManifest:
    """Provenance record written next to every command's outputs.

    Collects the resolved configuration, input file hashes and output file
    hashes; on failure a FAILED marker file is written alongside so that
    partially written directories are never mistaken for results.
    """

    def __init__(self, out_dir, command, config: dict, version: str):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.command = list(command)
        self.config = dict(config)
        self.version = version
        self.inputs = {}
        self.outputs = []
        self.t0 = time.time()

    def add_input(self, path):
        self.inputs[str(path)] = sha256_file(path)

    def add_output(self, path):
        self.outputs.append(Path(path))
        return path

    def _payload(self, failed: bool, error: str | None):
        return {
            "command": self.command,
            "config": self.config,
            "version": self.version,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
            "elapsed_seconds": time.time() - self.t0,
            "inputs": self.inputs,
            "outputs": [{"path": p.name, "sha256": sha256_file(p)}
                        for p in self.outputs if p.exists()],
            "failed": failed,
            "error": error,
        }

    def finalize(self):
        write_json(self.out_dir / "manifest.json", self._payload(False, None))
        marker = self.out_dir / "FAILED"
        if marker.exists():
            marker.unlink()

    def fail(self, error: str):
        write_json(self.out_dir / "manifest.json", self._payload(True, error))
        (self.out_dir / "FAILED").write_text(error + "\n")
