#!/usr/bin/env python3
"""Regenerate the 10-document evaluation fixture and its manifest.

The scores in manifest.json are computed here, independently of the C++
library: the alignment distance by enumerating every monotone path through
the element cost grid, NED with a plain Levenshtein table.

    python3 make_fixture.py [outdir]
"""

import json
import random
import sys
from pathlib import Path

SEED = 20240517
DOCS = 10
# No '#' or '~' anywhere: the acceptance suite uses them as corruption symbols.
ALPHABET = "abcdefghijklmnopqrstuvwxyz  .,;:()=+-<>^_{}\\0123456789éλ中"


def rnd_text(rng, lo, hi):
    return "".join(rng.choice(ALPHABET) for _ in range(rng.randint(lo, hi))).strip() or "x"


def clamp(v, lo, hi):
    return max(lo, min(hi, v))


def rnd_box(rng, w, h, min_size=20.0):
    x0 = rng.uniform(0, w - min_size)
    y0 = rng.uniform(0, h - min_size)
    x1 = rng.uniform(x0 + min_size, min(w, x0 + w / 2))
    y1 = rng.uniform(y0 + min_size, min(h, y0 + h / 3))
    return [round(x0, 2), round(y0, 2), round(x1, 2), round(y1, 2)]


def sub_box(rng, box):
    x0, y0, x1, y1 = box
    a = rng.uniform(x0, x1)
    b = rng.uniform(x0, x1)
    c = rng.uniform(y0, y1)
    d = rng.uniform(y0, y1)
    return [round(min(a, b), 2), round(min(c, d), 2), round(max(a, b), 2), round(max(c, d), 2)]


def make_content(rng, category, box):
    if category == "Paragraph":
        return {"lines": [{"bbox": sub_box(rng, box), "text": rnd_text(rng, 3, 14)} for _ in range(rng.randint(1, 3))]}
    if category == "Table":
        rows = []
        for _ in range(rng.randint(1, 2)):
            row = []
            for _ in range(rng.randint(1, 3)):
                row.append({"bbox": sub_box(rng, box), "rowspan": 1, "colspan": rng.choice([1, 1, 2]),
                            "text": rnd_text(rng, 1, 5)})
            rows.append(row)
        return {"rows": rows}
    if category == "Formula":
        return {"latex": rnd_text(rng, 2, 12)}
    return {}


def make_gt(rng, i):
    w = round(rng.uniform(600, 1200), 1)
    h = round(rng.uniform(800, 1600), 1)
    # every document leaves out Paragraph or Formula so that categories can
    # be corrupted into one the ground truth never uses
    missing = rng.choice(["Paragraph", "Formula"])
    allowed = [c for c in ("Paragraph", "Table", "Formula", "Figure") if c != missing]
    elements = []
    for _ in range(rng.randint(1, 6)):
        cat = rng.choice(allowed)
        box = rnd_box(rng, w, h)
        elements.append({"category": cat, "bbox": box, "content": make_content(rng, cat, box)})
    return {"id": "doc-%02d" % i, "page_width": w, "page_height": h, "elements": elements}


def edit_text(rng, s):
    s = list(s)
    for _ in range(rng.randint(0, 3)):
        op = rng.randint(0, 2)
        if op == 0 and s:
            del s[rng.randrange(len(s))]
        elif op == 1:
            s.insert(rng.randint(0, len(s)), rng.choice(ALPHABET))
        elif s:
            s[rng.randrange(len(s))] = rng.choice(ALPHABET)
    return "".join(s)


def jitter_box(rng, box, w, h):
    x0, y0, x1, y1 = box
    dx = rng.uniform(-15, 15)
    dy = rng.uniform(-15, 15)
    x0, x1 = clamp(x0 + dx, 0, w), clamp(x1 + dx + rng.uniform(-5, 5), 0, w)
    y0, y1 = clamp(y0 + dy, 0, h), clamp(y1 + dy + rng.uniform(-5, 5), 0, h)
    return [round(min(x0, x1), 2), round(min(y0, y1), 2), round(max(x0, x1), 2), round(max(y0, y1), 2)]


def perturb_element(rng, e, w, h):
    e = json.loads(json.dumps(e))
    e["bbox"] = jitter_box(rng, e["bbox"], w, h)
    c = e["content"]
    if "lines" in c:
        for line in c["lines"]:
            line["text"] = edit_text(rng, line["text"])
    elif "rows" in c:
        for row in c["rows"]:
            for cell in row:
                cell["text"] = edit_text(rng, cell["text"])
    elif "latex" in c:
        c["latex"] = edit_text(rng, c["latex"])
    if rng.random() < 0.15:
        cat = rng.choice(["Paragraph", "Table", "Formula", "Figure"])
        e["category"] = cat
        e["content"] = make_content(rng, cat, e["bbox"])
    return e


def make_pred(rng, gt, i):
    w, h = gt["page_width"], gt["page_height"]
    if i == DOCS - 1:
        elements = []  # one prediction misses the whole page
    else:
        elements = [perturb_element(rng, e, w, h) for e in gt["elements"] if rng.random() > 0.15]
        if rng.random() < 0.4:
            cat = rng.choice(["Paragraph", "Table", "Formula", "Figure"])
            box = rnd_box(rng, w, h)
            elements.insert(rng.randint(0, len(elements)), {"category": cat, "bbox": box,
                                                            "content": make_content(rng, cat, box)})
        if len(elements) > 1 and rng.random() < 0.3:
            a, b = rng.sample(range(len(elements)), 2)
            elements[a], elements[b] = elements[b], elements[a]
    return {"id": gt["id"], "page_width": w, "page_height": h, "elements": elements[:6]}


# ---------------------------------------------------------------------------
# Oracle


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def text_of(e):
    c = e.get("content", {})
    if e["category"] == "Paragraph":
        return "\n".join(line["text"] for line in c["lines"])
    if e["category"] == "Table":
        out = []
        for row in c["rows"]:
            out.append("<tr>")
            for cell in row:
                attrs = ""
                if cell.get("rowspan", 1) > 1:
                    attrs += ' rowspan="%d"' % cell["rowspan"]
                if cell.get("colspan", 1) > 1:
                    attrs += ' colspan="%d"' % cell["colspan"]
                out.append("<td%s>%s</td>" % (attrs, cell["text"]))
            out.append("</tr>")
        return "".join(out)
    if e["category"] == "Formula":
        return c["latex"]
    return ""


def iou(a, b):
    iw = max(0.0, min(a[2], b[2]) - max(a[0], b[0]))
    ih = max(0.0, min(a[3], b[3]) - max(a[1], b[1]))
    inter = iw * ih
    union = (a[2] - a[0]) * (a[3] - a[1]) + (b[2] - b[0]) * (b[3] - b[1]) - inter
    return inter / union if union > 0 else 0.0


def cost(g, p):
    loc = ((g["category"] != p["category"]) + (1.0 - iou(g["bbox"], p["bbox"]))) / 2.0
    tg, tp = text_of(g), text_of(p)
    m = max(len(tg), len(tp))
    tran = levenshtein(tg, tp) / m if m else 0.0
    return (loc + tran) / 2.0


def min_path(grid):
    rows, cols = len(grid), len(grid[0])
    best = [float("inf")]

    def walk(i, j, acc):
        acc += grid[i][j]
        if i == rows - 1 and j == cols - 1:
            best[0] = min(best[0], acc)
            return
        if i + 1 < rows:
            walk(i + 1, j, acc)
        if j + 1 < cols:
            walk(i, j + 1, acc)
        if i + 1 < rows and j + 1 < cols:
            walk(i + 1, j + 1, acc)

    walk(0, 0, 0.0)
    return best[0]


def doc_term(g, p):
    k, kt = len(g["elements"]), len(p["elements"])
    if k == 0 and kt == 0:
        return 0.0, 0.0
    if k == 0 or kt == 0:
        return float(max(k, kt)), 1.0
    grid = [[cost(a, b) for b in p["elements"]] for a in g["elements"]]
    d = min_path(grid)
    return d, d / max(k, kt)


def markdown(doc):
    return "\n\n".join(text_of(e) for e in doc["elements"])


def ned(a, b):
    m = max(len(a), len(b))
    return 1.0 if m == 0 else 1.0 - levenshtein(a, b) / m


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent
    rng = random.Random(SEED)
    gts = [make_gt(rng, i) for i in range(DOCS)]
    preds = [make_pred(rng, g, i) for i, g in enumerate(gts)]

    terms = [doc_term(g, p) for g, p in zip(gts, preds)]
    dsm = 1.0 - sum(t[1] for t in terms) / len(terms)
    ned_mean = sum(ned(markdown(g), markdown(p)) for g, p in zip(gts, preds)) / len(gts)

    with open(out / "gt.jsonl", "w", encoding="utf-8") as f:
        for d in gts:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")
    with open(out / "pred.jsonl", "w", encoding="utf-8") as f:
        for d in preds:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")
    manifest = {
        "documents": DOCS,
        "seed": SEED,
        "dsm": round(dsm, 4),
        "ned": round(ned_mean, 4),
        "dsm_exact": dsm,
        "ned_exact": ned_mean,
        "per_document": [{"id": g["id"], "distance": t[0], "normalized": t[1]} for g, t in zip(gts, terms)],
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
