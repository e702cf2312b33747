#!/usr/bin/env python3
"""Regenerates the committed binary test fixtures.

Everything here is deterministic (fixed seeds), so re-running the script
reproduces the committed files byte-for-byte except where PIL encoder
versions differ. The face-detector section mirrors the sliding-window
semantics of include/photoscreen/imaging/detect.hpp and verifies that the
bundled cascade finds exactly the planted faces before anything is written.
"""

import json
import math
import os
import random
import sys

from PIL import Image

HERE = os.path.dirname(os.path.abspath(__file__))
FACES_DIR = os.path.join(HERE, "faces")
CODEC_DIR = os.path.join(HERE, "codec")
DATA_DIR = os.path.normpath(os.path.join(HERE, "..", "..", "data"))
CASCADE_PATH = os.path.join(DATA_DIR, "cascades", "frontal_face.json")

os.makedirs(FACES_DIR, exist_ok=True)
os.makedirs(CODEC_DIR, exist_ok=True)
os.makedirs(os.path.dirname(CASCADE_PATH), exist_ok=True)


def lround(x):
    """C++ lround for non-negative x."""
    return int(math.floor(x + 0.5))


# ---------------------------------------------------------------------------
# face pattern
# ---------------------------------------------------------------------------

def render_background(w, h, seed, base=120, noise=2, grad=(0.0, 0.0)):
    rnd = random.Random(seed)
    px = []
    for y in range(h):
        row = []
        for x in range(w):
            v = int(base + grad[0] * x + grad[1] * y)
            if noise:
                v += rnd.randint(-noise, noise)
            row.append(min(255, max(0, v)))
        px.append(row)
    return px


def render_face(px, fx, fy, s, fill=180, eye=60, mouth=80, eyes_y=0.25):
    """Stylized frontal face: bright square, two dark eyes, dark mouth."""
    for y in range(fy, fy + s):
        for x in range(fx, fx + s):
            px[y][x] = fill
    eye_w = max(1, lround(0.25 * s))
    eye_h = max(1, lround(0.20 * s))
    ey = fy + lround(eyes_y * s)
    for ex in (fx + lround(0.15 * s), fx + lround(0.60 * s)):
        for y in range(ey, min(ey + eye_h, fy + s)):
            for x in range(ex, min(ex + eye_w, fx + s)):
                px[y][x] = eye
    mx = fx + lround(0.30 * s)
    my = fy + lround(0.66 * s)
    mw = lround(0.40 * s)
    mh = lround(0.15 * s)
    for y in range(my, min(my + mh, fy + s)):
        for x in range(mx, min(mx + mw, fx + s)):
            px[y][x] = mouth


CASCADE = {
    "window": [24, 24],
    "stages": [
        {
            "threshold": 2.0,
            "weak": [
                {
                    "rects": [[4, 11, 16, 5, 1.0], [4, 6, 16, 5, -1.0]],
                    "threshold": 0.15,
                    "left": 0.0,
                    "right": 1.0,
                },
                {
                    "rects": [[7, 20, 10, 4, 1.0], [7, 16, 10, 4, -1.0]],
                    "threshold": 0.08,
                    "left": 0.0,
                    "right": 1.0,
                },
            ],
        },
        {
            "threshold": 1.0,
            "weak": [
                {
                    "rects": [
                        [10, 6, 4, 5, 1.0],
                        [4, 6, 5, 5, -0.5],
                        [15, 6, 5, 5, -0.5],
                    ],
                    "threshold": 0.04,
                    "left": 0.0,
                    "right": 1.0,
                }
            ],
        },
    ],
}


# ---------------------------------------------------------------------------
# detector replica (semantics mirror detect.hpp)
# ---------------------------------------------------------------------------

def integrals(px, w, h):
    sat = [[0.0] * (w + 1) for _ in range(h + 1)]
    sat2 = [[0.0] * (w + 1) for _ in range(h + 1)]
    for y in range(h):
        row = 0.0
        row2 = 0.0
        for x in range(w):
            v = float(px[y][x])  # gray image: luma == value
            row += v
            row2 += v * v
            sat[y + 1][x + 1] = sat[y][x + 1] + row
            sat2[y + 1][x + 1] = sat2[y][x + 1] + row2
    return sat, sat2


def rect_sum(tbl, x, y, w, h):
    return tbl[y + h][x + w] - tbl[y][x + w] - tbl[y + h][x] + tbl[y][x]


def iou(a, b):
    x1 = max(a[0], b[0])
    y1 = max(a[1], b[1])
    x2 = min(a[0] + a[2], b[0] + b[2])
    y2 = min(a[1] + a[3], b[1] + b[3])
    inter = max(0, x2 - x1) * max(0, y2 - y1)
    if inter <= 0:
        return 0.0
    return inter / float(a[2] * a[3] + b[2] * b[3] - inter)


def scan_pass(sat, sat2, img_w, img_h, factor):
    raw = []
    scale = 1.0
    while True:
        win_w = lround(24 * scale)
        win_h = lround(24 * scale)
        if win_w > img_w or win_h > img_h:
            break
        step = max(1, lround(scale))
        area = float(win_w * win_h)
        y = 0
        while y + win_h <= img_h:
            x = 0
            while x + win_w <= img_w:
                mean = rect_sum(sat, x, y, win_w, win_h) / area
                var = rect_sum(sat2, x, y, win_w, win_h) / area - mean * mean
                stddev = math.sqrt(max(0.0, var))
                if stddev >= 1.0:
                    passed = True
                    for stage in CASCADE["stages"]:
                        ssum = 0.0
                        for weak in stage["weak"]:
                            feat = 0.0
                            for rx0, ry0, rw0, rh0, wgt in weak["rects"]:
                                rx = x + lround(rx0 * scale)
                                ry = y + lround(ry0 * scale)
                                rw = min(lround(rw0 * scale), x + win_w - rx)
                                rh = min(lround(rh0 * scale), y + win_h - ry)
                                feat += wgt * rect_sum(sat, rx, ry, rw, rh)
                            feat /= area * stddev
                            ssum += weak["left"] if feat < weak["threshold"] else weak["right"]
                        if ssum < stage["threshold"]:
                            passed = False
                            break
                    if passed:
                        raw.append((x, y, win_w, win_h))
                x += step
            y += step
        scale *= factor
    return raw


def group_hits(raw, min_neighbors, min_size):
    n = len(raw)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if iou(raw[i], raw[j]) >= 0.3:
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    clusters = {}
    for i in range(n):
        clusters.setdefault(find(i), []).append(raw[i])
    out = []
    for members in clusters.values():
        if len(members) < max(1, min_neighbors):
            continue
        m = len(members)
        box = tuple(lround(sum(b[k] for b in members) / m) for k in range(4))
        if box[2] >= min_size[0] and box[3] >= min_size[1]:
            out.append(box)
    return out


def detect(px, w, h, scale_factors=(1.05, 1.4), min_neighbors=4, min_size=(20, 20)):
    sat, sat2 = integrals(px, w, h)
    merged = []
    pass_of = []
    for p, f in enumerate(scale_factors):
        for box in group_hits(scan_pass(sat, sat2, w, h, f), min_neighbors, min_size):
            merged.append(box)
            pass_of.append(p)
    n = len(merged)
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if pass_of[i] != pass_of[j] and iou(merged[i], merged[j]) >= 0.3:
                a, b = find(i), find(j)
                if a != b:
                    parent[max(a, b)] = min(a, b)
    comps = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(merged[i])
    out = []
    for members in comps.values():
        m = len(members)
        out.append(tuple(lround(sum(b[k] for b in members) / m) for k in range(4)))
    return sorted(out, key=lambda b: (b[1], b[0], b[2], b[3]))


def save_gray_png(px, path):
    h = len(px)
    w = len(px[0])
    img = Image.new("RGB", (w, h))
    img.putdata([(v, v, v) for row in px for v in row])
    img.save(path, format="PNG")


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------

def build_corpus():
    records = []
    idx = 0

    def emit(px, w, h, group, has_face, boxes, expect_detected, note):
        nonlocal idx
        name = "img_%03d.png" % idx
        idx += 1
        got = detect(px, w, h)
        if len(got) != expect_detected:
            raise SystemExit(
                "fixture %s (%s): expected %d detections, replica found %d: %r"
                % (name, note, expect_detected, len(got), got)
            )
        for ann in boxes:
            if expect_detected and not any(iou(ann, g) >= 0.5 for g in got):
                if len(boxes) == expect_detected:
                    raise SystemExit(
                        "fixture %s: annotation %r not covered by %r" % (name, ann, got)
                    )
        save_gray_png(px, os.path.join(FACES_DIR, name))
        records.append(
            {
                "image": name,
                "group": group,
                "has_face": has_face,
                "face_count": len(boxes) if has_face else 0,
                "boxes": [list(b) for b in boxes],
                "note": note,
            }
        )

    groups = ["depressed", "healthy"]

    # plain backgrounds: no face, none detected
    for i in range(11):
        w = h = 96
        grad = [(0.0, 0.0), (0.4, 0.0), (0.0, 0.4), (0.3, 0.2)][i % 4]
        px = render_background(w, h, seed=100 + i, grad=grad)
        emit(px, w, h, groups[i % 2], False, [], 0, "background")

    # flat image: variance gate rejects every window
    px = render_background(96, 96, seed=0, noise=0)
    emit(px, 96, 96, "healthy", False, [], 0, "flat")

    # distractor: solid dark square (variance present, not a face)
    px = render_background(96, 96, seed=200)
    for y in range(30, 62):
        for x in range(30, 62):
            px[y][x] = 40
    emit(px, 96, 96, "depressed", False, [], 0, "distractor-square")

    # distractor: horizontal stripes
    px = render_background(96, 96, seed=201)
    for y in range(20, 80, 8):
        for yy in range(y, y + 3):
            for x in range(10, 86):
                px[yy][x] = 70
    emit(px, 96, 96, "healthy", False, [], 0, "distractor-stripes")

    # single faces across scales and positions
    sizes = [24, 24, 28, 32, 34, 36, 40, 44, 48, 52, 56, 60, 64, 34, 28, 40]
    positions = [
        (6, 6), (40, 50), (30, 20), (50, 8), (10, 40), (25, 25), (8, 30), (30, 40),
        (20, 10), (12, 24), (18, 30), (24, 16), (16, 16), (52, 40), (60, 30), (36, 36),
    ]
    for i, (s, (fx, fy)) in enumerate(zip(sizes, positions)):
        w = h = 112
        px = render_background(w, h, seed=300 + i)
        render_face(px, fx, fy, s)
        emit(px, w, h, groups[i % 2], True, [(fx, fy, s, s)], 1, "face-%dpx" % s)

    # two well-separated faces
    pairs = [
        ((6, 6, 28), (70, 66, 34)),
        ((4, 60, 32), (64, 6, 40)),
        ((8, 8, 24), (60, 60, 44)),
        ((6, 56, 36), (68, 10, 36)),
        ((10, 4, 30), (66, 62, 30)),
        ((4, 40, 26), (62, 4, 42)),
    ]
    for i, (a, b) in enumerate(pairs):
        w = h = 128
        px = render_background(w, h, seed=400 + i)
        render_face(px, a[0], a[1], a[2])
        render_face(px, b[0], b[1], b[2])
        boxes = [(a[0], a[1], a[2], a[2]), (b[0], b[1], b[2], b[2])]
        emit(px, w, h, groups[i % 2], True, boxes, 2, "two-faces")

    # faces below the detectable window size: annotated but undetected
    for i in range(3):
        w = h = 96
        px = render_background(w, h, seed=500 + i)
        fx, fy = [(30, 30), (10, 60), (60, 12)][i]
        render_face(px, fx, fy, 16)
        emit(px, w, h, groups[i % 2], True, [(fx, fy, 16, 16)], 0, "face-too-small")

    # eyes rendered low: human sees a face, the cascade geometry does not
    for i in range(2):
        w = h = 96
        px = render_background(w, h, seed=520 + i)
        fx, fy = [(20, 20), (40, 36)][i]
        render_face(px, fx, fy, 36, eyes_y=0.55)
        emit(px, w, h, groups[i % 2], True, [(fx, fy, 36, 36)], 0, "face-atypical")

    # face-like texture annotated as non-face: detector false positives
    for i in range(3):
        w = h = 96
        px = render_background(w, h, seed=540 + i)
        fx, fy = [(26, 26), (12, 44), (48, 16)][i]
        render_face(px, fx, fy, 32)
        emit(px, w, h, groups[i % 2], False, [], 1, "pattern-not-a-face")

    with open(os.path.join(FACES_DIR, "annotations.jsonl"), "w") as f:
        for r in records:
            f.write(json.dumps(r, sort_keys=True) + "\n")
    return len(records)


# ---------------------------------------------------------------------------
# codec fixtures
# ---------------------------------------------------------------------------

def build_codec_fixtures():
    expected = {}

    # RGB gradient png with analytically known pixels
    w, h = 16, 16
    img = Image.new("RGB", (w, h))
    img.putdata([(x * 16, y * 16, 128) for y in range(h) for x in range(w)])
    img.save(os.path.join(CODEC_DIR, "rgb_gradient.png"))
    expected["rgb_gradient.png"] = {
        "width": w, "height": h,
        "formula": "r=x*16, g=y*16, b=128",
    }

    # grayscale png
    img = Image.new("L", (8, 8))
    img.putdata([min(255, (x + y) * 18) for y in range(8) for x in range(8)])
    img.save(os.path.join(CODEC_DIR, "gray.png"))
    expected["gray.png"] = {"width": 8, "height": 8, "formula": "r=g=b=min(255,(x+y)*18)"}

    # palette png
    img = Image.new("P", (8, 8))
    img.putpalette(sum(([i, 255 - i, (i * 3) % 256] for i in range(256)), []))
    img.putdata([(x + 8 * y) % 256 for y in range(8) for x in range(8)])
    img.save(os.path.join(CODEC_DIR, "palette.png"))
    expected["palette.png"] = {
        "width": 8, "height": 8,
        "formula": "idx=x+8*y; r=idx, g=255-idx, b=(idx*3)%256",
    }

    # rgba png; decoder strips alpha without compositing
    img = Image.new("RGBA", (8, 8))
    img.putdata([(x * 30, y * 30, 200, 128) for y in range(8) for x in range(8)])
    img.save(os.path.join(CODEC_DIR, "rgba.png"))
    expected["rgba.png"] = {"width": 8, "height": 8, "formula": "r=x*30, g=y*30, b=200"}

    # solid-color jpeg, near-lossless at this quality
    img = Image.new("RGB", (64, 64), (200, 100, 50))
    img.save(os.path.join(CODEC_DIR, "solid.jpg"), quality=95)
    expected["solid.jpg"] = {
        "width": 64, "height": 64, "rgb": [200, 100, 50], "tolerance": 4,
    }

    # subsampled jpeg with a reference dump decoded by PIL
    w, h = 48, 32
    img = Image.new("RGB", (w, h))
    img.putdata([
        ((x * 5) % 256, (y * 7) % 256, ((x + y) * 3) % 256)
        for y in range(h) for x in range(w)
    ])
    path = os.path.join(CODEC_DIR, "gradient420.jpg")
    img.save(path, quality=90, subsampling=2)
    ref = Image.open(path).convert("RGB")
    with open(os.path.join(CODEC_DIR, "gradient420.rgb"), "wb") as f:
        f.write(bytes(v for p in ref.getdata() for v in p))
    expected["gradient420.jpg"] = {
        "width": w, "height": h, "reference": "gradient420.rgb", "tolerance": 2,
    }

    # corrupt png: valid signature, truncated body
    with open(os.path.join(CODEC_DIR, "rgb_gradient.png"), "rb") as f:
        head = f.read(40)
    with open(os.path.join(CODEC_DIR, "truncated.png"), "wb") as f:
        f.write(head)

    # unsupported format
    Image.new("RGB", (4, 4), (1, 2, 3)).save(os.path.join(CODEC_DIR, "animated.gif"))

    with open(os.path.join(CODEC_DIR, "expected.json"), "w") as f:
        json.dump(expected, f, indent=2, sort_keys=True)


def main():
    with open(CASCADE_PATH, "w") as f:
        json.dump(CASCADE, f, indent=2, sort_keys=True)
    n = build_corpus()
    build_codec_fixtures()
    print("wrote cascade + %d corpus images + codec fixtures" % n)


if __name__ == "__main__":
    main()
