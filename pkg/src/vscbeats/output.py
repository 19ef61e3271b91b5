"""Deterministic data emission: CSV, JSON, and bare-bones SVG line plots.

Every file starts with a header recording the tool version, the resolved
parameters, and the seed, so a run can be reproduced from its outputs alone.
Floats are written as shortest round-trip decimals; nothing time- or
path-dependent enters the bytes, so identical runs produce identical files.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .errors import InvalidInput


def format_float(x) -> str:
    """Shortest decimal that round-trips to the same float64."""
    return repr(float(x))


def header_lines(version: str, seed: int | None, params_text: str,
                 extra: dict | None = None) -> list[str]:
    lines = [f"vscbeats {version}", f"params: {params_text}"]
    if seed is not None:
        lines.append(f"seed: {seed}")
    for key, value in (extra or {}).items():
        lines.append(f"{key}: {value}")
    return lines


def params_text(params) -> str:
    return (f"omega_v={format_float(params.omega_v)} "
            f"omega_c={format_float(params.omega_c)} "
            f"omega_d={format_float(params.omega_d)} "
            f"n_molecules={params.n_molecules} "
            f"mass={format_float(params.mass)} "
            f"x0={format_float(params.x0)}")


def write_csv(path: str, header: list[str], columns: dict[str, np.ndarray]) -> None:
    """Comma-separated columns with '#'-prefixed header lines."""
    names = list(columns)
    if not names:
        raise InvalidInput("no columns to write")
    length = len(columns[names[0]])
    for name in names:
        if len(columns[name]) != length:
            raise InvalidInput(f"column {name!r} has mismatched length")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        for line in header:
            fh.write(f"# {line}\n")
        fh.write(",".join(names) + "\n")
        cols = [columns[name] for name in names]
        for k in range(length):
            fh.write(",".join(format_float(col[k]) for col in cols) + "\n")


def write_json(path: str, header: list[str], payload: dict) -> None:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    doc = {"header": header, **_jsonable(payload)}
    with open(path, "w", newline="\n") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    return obj

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
_W, _H, _PAD = 840, 520, 56


def write_svg(path: str, title: str, x: np.ndarray,
              series: dict[str, np.ndarray]) -> None:
    """Minimal multi-line plot; convenience only, never part of verification."""
    x = np.asarray(x, dtype=float)
    ys = {k: np.asarray(v, dtype=float) for k, v in series.items()}
    if not ys:
        raise InvalidInput("no series to plot")
    ymin = min(float(v.min()) for v in ys.values())
    ymax = max(float(v.max()) for v in ys.values())
    if ymax == ymin:
        ymax = ymin + 1.0
    xmin, xmax = float(x.min()), float(x.max())
    if xmax == xmin:
        xmax = xmin + 1.0

    def sx(v):
        return _PAD + (v - xmin) / (xmax - xmin) * (_W - 2 * _PAD)

    def sy(v):
        return _H - _PAD - (v - ymin) / (ymax - ymin) * (_H - 2 * _PAD)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{_PAD}" y1="{_H - _PAD}" x2="{_W - _PAD}" y2="{_H - _PAD}" '
        'stroke="black"/>',
        f'<line x1="{_PAD}" y1="{_PAD}" x2="{_PAD}" y2="{_H - _PAD}" '
        'stroke="black"/>',
        f'<text x="{_PAD}" y="{_H - _PAD + 18}" font-family="sans-serif" '
        f'font-size="11">{xmin:.6g}</text>',
        f'<text x="{_W - _PAD}" y="{_H - _PAD + 18}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{xmax:.6g}</text>',
        f'<text x="{_PAD - 4}" y="{_H - _PAD}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{ymin:.6g}</text>',
        f'<text x="{_PAD - 4}" y="{_PAD + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="11">{ymax:.6g}</text>',
    ]
    for i, (name, y) in enumerate(ys.items()):
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{sx(xv):.2f},{sy(yv):.2f}" for xv, yv in zip(x, y))
        parts.append(f'<polyline fill="none" stroke="{color}" '
                     f'stroke-width="1.2" points="{pts}"/>')
        parts.append(f'<text x="{_W - _PAD + 4}" y="{_PAD + 16 * i + 10}" '
                     f'font-family="sans-serif" font-size="11" '
                     f'fill="{color}">{name}</text>')
    parts.append("</svg>")
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
