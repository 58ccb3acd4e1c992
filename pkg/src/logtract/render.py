"""Escape-time raster of a family over a viewport, with traced-ray overlay.

Pixels are classified with the definite-escape test only: escaping pixels
are shaded by exit index, re-entering and undecided pixels get their own
colors (no "probably escapes").  Rows are processed in chunks sized by the
LOGTRACT_WORKERS environment variable; the output is assembled by index,
so the image does not depend on the chunking.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from PIL import Image, PngImagePlugin

from .config import RenderSettings, VERSION
from .families import FunctionFamily
from .rays import HairTail, escape_test

UNDECIDED = (24, 24, 32)
REENTERED = (40, 90, 160)
OVERLAY = (255, 255, 255)


def _escape_color(n_exit: int, horizon: int) -> tuple[int, int, int]:
    u = 1.0 - min(n_exit, horizon) / max(horizon, 1)
    return (int(40 + 215 * u), int(20 + 160 * u * u), int(90 * (1 - u) + 30))


def classify_row(f: FunctionFamily, settings: RenderSettings, row: int) -> list[tuple[int, int, int]]:
    R = math.exp(settings.log_R)
    y = settings.y_max - (settings.y_max - settings.y_min) * (row + 0.5) / settings.height
    out = []
    for col in range(settings.width):
        x = settings.x_min + (settings.x_max - settings.x_min) * (col + 0.5) / settings.width
        v = escape_test(f, complex(x, y), R, settings.horizon)
        if v.kind == "escaping":
            out.append(_escape_color(v.index, settings.horizon))
        elif v.kind == "reentered":
            out.append(REENTERED)
        else:
            out.append(UNDECIDED)
    return out


def worker_count() -> int:
    raw = os.environ.get("LOGTRACT_WORKERS", "")
    try:
        n = int(raw)
        return max(1, n)
    except ValueError:
        return 1


def render_image(f: FunctionFamily, settings: RenderSettings,
                 tails: list[HairTail] | None = None) -> Image.Image:
    rows: list[list[tuple[int, int, int]] | None] = [None] * settings.height
    workers = worker_count()
    if workers == 1:
        for r in range(settings.height):
            rows[r] = classify_row(f, settings, r)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for r, data in zip(range(settings.height),
                               pool.map(lambda rr: classify_row(f, settings, rr),
                                        range(settings.height))):
                rows[r] = data
    arr = np.array(rows, dtype=np.uint8)
    if tails and settings.overlay_rays:
        for tail in tails:
            for p in tail.samples:
                z = p.plane_position
                if z is None:
                    continue
                col = (z.real - settings.x_min) / (settings.x_max - settings.x_min)
                rw = (settings.y_max - z.imag) / (settings.y_max - settings.y_min)
                ci, ri = int(col * settings.width), int(rw * settings.height)
                if 0 <= ci < settings.width and 0 <= ri < settings.height:
                    arr[ri, ci] = OVERLAY
    return Image.fromarray(arr, "RGB")


def save_png(img: Image.Image, path: str, config_hash: str) -> None:
    meta = PngImagePlugin.PngInfo()
    meta.add_text("logtract-version", VERSION)
    meta.add_text("config-hash", config_hash)
    img.save(path, "PNG", pnginfo=meta)
