"""Run artifacts: PGM maps, CSV traces, flat manifests, metric JSON.

Everything here is byte-deterministic: no timestamps, sorted keys, LF line
endings, repr-formatted floats.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import MalformedSidecar, SizeMismatch


def write_pgm(path, grid: np.ndarray) -> None:
    """Binary P5, one byte per value, ids above 255 capped."""
    grid = np.asarray(grid)
    if grid.ndim != 2:
        raise ValueError("PGM payload must be 2-D")
    h, w = grid.shape
    capped = np.minimum(np.maximum(grid, 0), 255).astype(np.uint8)
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(capped.tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise MalformedSidecar("not a binary P5 file")
    w, h, maxval = int(fields[1]), int(fields[2]), int(fields[3])
    if maxval > 255:
        raise MalformedSidecar("two-byte PGM not supported")
    pos += 1
    payload = data[pos : pos + h * w]
    if len(payload) != h * w:
        raise SizeMismatch("PGM payload shorter than header implies")
    return np.frombuffer(payload, dtype=np.uint8).reshape(h, w).astype(np.int64)


def write_label_csv(path, grid: np.ndarray) -> None:
    grid = np.asarray(grid)
    h, w = grid.shape
    lines = ["row,col,label"]
    for r in range(h):
        row = grid[r]
        lines.extend(f"{r},{c},{int(row[c])}" for c in range(w))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_label_csv(path) -> np.ndarray:
    rows = []
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if header != "row,col,label":
            raise MalformedSidecar(f"unexpected label CSV header {header!r}")
        for line in fh:
            if line.strip():
                r, c, v = line.strip().split(",")
                rows.append((int(r), int(c), int(v)))
    if not rows:
        raise SizeMismatch("label CSV has no rows")
    h = max(r for r, _, _ in rows) + 1
    w = max(c for _, c, _ in rows) + 1
    grid = np.zeros((h, w), dtype=np.int64)
    for r, c, v in rows:
        grid[r, c] = v
    return grid


def write_losses_csv(path, trace) -> None:
    lines = ["iter,loss_c,loss_g,loss_total,mu,n_recovered,n_removed,homophily_pseudo"]
    for row in trace:
        lines.append(
            f"{row.iteration},{row.loss_c!r},{row.loss_g!r},{row.loss_total!r},"
            f"{row.mu!r},{row.n_recovered},{row.n_removed},{row.homophily_pseudo!r}"
        )
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_edits_csv(path, edits_log) -> None:
    lines = ["iter,op,i,j,weight"]
    for it, op, i, j, w in edits_log:
        lines.append(f"{it},{op},{i},{j},{w!r}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_manifest(path, values: dict) -> None:
    lines = [f"{k}={_format_value(values[k])}" for k in sorted(values)]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def parse_kv_file(path) -> dict[str, str]:
    """Flat key=value text; blank lines and #-comments ignored."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise MalformedSidecar(f"{path}:{lineno}: expected key=value")
            key, _, value = stripped.partition("=")
            out[key.strip()] = value.strip()
    return out


def write_metrics_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_metrics_csv(path, report) -> None:
    """Single-row CSV form of a metrics report."""
    header = "oa,kappa,nmi,ari,purity,n_items,n_clusters,n_classes"
    row = (
        f"{report.oa!r},{report.kappa!r},{report.nmi!r},{report.ari!r},"
        f"{report.purity!r},{report.n_items},{report.n_clusters},{report.n_classes}"
    )
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(header + "\n" + row + "\n")


def write_matrix_csv(path, matrix, prefix: str = "c") -> None:
    """Row-indexed CSV dump of a dense matrix (debug aid for embeddings)."""
    matrix = np.asarray(matrix)
    cols = ",".join(f"{prefix}{i}" for i in range(matrix.shape[1]))
    lines = [f"row,{cols}"]
    for r in range(matrix.shape[0]):
        vals = ",".join(repr(float(v)) for v in matrix[r])
        lines.append(f"{r},{vals}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
