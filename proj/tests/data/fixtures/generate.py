#!/usr/bin/env python3
"""Regenerates the pipeline fixture cases in this directory.

Each case holds the input chart image, one recorded response per model call
(`<label>.txt`) and the expected assembled document (`final.revis.json`,
written loosely here and canonicalised afterwards with `recast fmt`).

Usage: python3 generate.py   (needs Pillow)
"""

import json
from pathlib import Path

from PIL import Image, ImageDraw

HERE = Path(__file__).resolve().parent
W, H = 480, 360


def canvas():
    img = Image.new("RGB", (W, H), "white")
    return img, ImageDraw.Draw(img)


def px(x, y, box=(0, 0, 100, 100)):
    """Maps chart units (y up) inside `box` to image pixels."""
    x1, y1, x2, y2 = box
    return (x1 + (x2 - x1) * x / 100) * W / 100, H - (y1 + (y2 - y1) * y / 100) * H / 100


def bars(draw, values, box, color):
    n = len(values)
    for i, v in enumerate(values):
        left, bottom = px(i * 100 / n + 2, 0, box)
        right, top = px((i + 1) * 100 / n - 2, v, box)
        draw.rectangle([left, top, right, bottom], fill=color)


def node(cid, kind, frame, children=None, mark=None, description=""):
    n = {"container_id": cid, "description": description, "coordinate": kind, "coordinate_system": frame}
    n["if_leaf"] = not children
    if mark:
        n["mark_type"] = mark
    if children:
        n["components"] = children
    return n


def cart(x1=0, y1=0, x2=100, y2=100):
    return {"x1": x1, "y1": y1, "x2": x2, "y2": y2}


def polar(cx=0.5, cy=0.5, r1=0, r2=1, a1=0, a2=360):
    return {"cx": cx, "cy": cy, "r1": r1, "r2": r2, "a1": a1, "a2": a2}


def dim(**kw):
    d = {"stacking": False, "stacking_direction": "min", "anchor": "min", "subdividing": False,
         "2d_flatten": False, "size_uniform": True, "size_range": [0, 0],
         "anchor_distribute": "fixed_value", "anchor_interval": None, "anchor_start": None}
    d.update(kw)
    return d


def slots(n, size):
    return dim(size_range=[size, size], anchor_distribute="uniform_interval", anchor_interval=100 / n, anchor_start=0)


def value_sized():
    return dim(size_uniform=False, size_range=[0, 100], anchor_start=0)


def structure(kind, n, pdim, items=None, sdim=None):
    size = {"primary": {"number": n, "dimension": pdim}}
    if items is not None:
        size["secondary"] = {"number": items, "dimension": sdim}
    return {"data_type": kind, "data_size": size}


def mark(kind, link="no_link", **extra):
    m = {"mark_type": kind, "is_link_mark": link != "no_link", "link_mark_type": link}
    m.update(extra)
    return m


def fill(color):
    return {"fill": {"scale": "fix", "fix": color}}


def write(case, files):
    d = HERE / case
    d.mkdir(exist_ok=True)
    for name, content in files.items():
        if isinstance(content, Image.Image):
            content.save(d / name, optimize=False)
        else:
            text = content if isinstance(content, str) else json.dumps(content, indent=2)
            (d / name).write_text(text + ("" if text.endswith("\n") else "\n"))


def fenced(payload, prose="Here is the JSON:"):
    return f"{prose}\n```json\n{json.dumps(payload, indent=2)}\n```\n"


# ------------------------------------------------------------------ bar
def bar_case():
    values = [55, 80, 35, 95, 60, 40]
    img, draw = canvas()
    bars(draw, values, (0, 0, 100, 100), "#4c78a8")
    tree = node("0", "cartesian", cart(), mark="rectangle", description="a simple bar chart of six bars")
    leaf = {
        "data_structure": structure("1D_LIST", 6, "x"),
        "mark_specification": mark("rectangle"),
        "layout_specification": {"x": slots(6, 100 / 6), "y": value_sized()},
        "non_layout_specification": fill("#4C78A8"),
    }
    final = dict(tree)
    final["data_specification"] = {"0": leaf}
    write("bar", {
        "image.png": img,
        "step1.txt": fenced(tree),
        "step2a.txt": {"cleaned_dsl": tree, "template_index": []},
        "step3-0.txt": leaf,
        "final.revis.json": final,
    })


# ------------------------------------------------------------------ small multiples
def small_multiples_case():
    img, draw = canvas()
    bars(draw, [40, 70, 55], (0, 0, 30, 100), "#f58518")
    bars(draw, [65, 30, 85], (30, 0, 60, 100), "#f58518")
    pts = [px(60 + 40 * i / 5, v) for i, v in enumerate([20, 45, 35, 70, 60])]
    draw.line(pts, fill="#54a24b", width=3)

    panel = lambda cid, x1, x2: node(cid, "cartesian", cart(x1, 0, x2, 100),
                                     [node(cid + "-0", "cartesian", cart(x1, 0, x2, 100), mark="rectangle")],
                                     description="same visual component.")
    line_leaf = node("0-2", "cartesian", cart(60, 0, 100, 100), mark="line", description="different visual component")
    structure_tree = node("0", "cartesian", cart(), [panel("0-0", 0, 30), panel("0-1", 30, 60), line_leaf])
    template = node("0-a", "cartesian", cart(0, 0, 60, 100),
                    [node("0-a-0", "cartesian", cart(), mark="rectangle")],
                    description="template for one bar panel, repeated twice along x as a 1D_LIST.")
    cleaned = node("0", "cartesian", cart(), [template, line_leaf])
    index = [{"template_id": "0-a", "instance_ids": ["0-0", "0-1"],
              "instance_bboxes": [cart(0, 0, 30, 100), cart(30, 0, 60, 100)]}]
    template_spec = {
        "container_id": "0-a",
        "data_structure": structure("1D_LIST", 2, "x"),
        "layout_specification": {"x": slots(2, 50)},
    }
    bar_leaf = {
        "data_structure": structure("1D_LIST", 3, "x"),
        "mark_specification": mark("rectangle"),
        "layout_specification": {"x": slots(3, 100 / 3), "y": value_sized()},
        "non_layout_specification": fill("#F58518"),
    }
    line_spec = {
        "data_structure": structure("2D_MATRIX", 1, "y", 5, "x"),
        "mark_specification": mark("line", "group_type", group_link_direction="x"),
        "layout_specification": {
            "x": dim(anchor_distribute="uniform_interval", anchor_interval=20, anchor_start=0),
            "y": value_sized(),
        },
        "non_layout_specification": {"line_type": "straight", "stroke": {"scale": "fix", "fix": "#54A24B"}},
    }
    spec_only = {k: v for k, v in template_spec.items() if k != "container_id"}
    final = dict(cleaned)
    final["data_specification"] = {"0-a": spec_only, "0-a-0": bar_leaf, "0-2": line_spec}
    write("small_multiples", {
        "image.png": img,
        "step1.txt": structure_tree,
        "step2a.txt": {"cleaned_dsl": cleaned, "template_index": index},
        "step2b-0-a.txt": template_spec,
        "step3-0-a-0.txt": bar_leaf,
        "step3-0-2.txt": fenced(line_spec, "The line container:"),
        "final.revis.json": final,
    })


# ------------------------------------------------------------------ composite
def composite_case():
    img, draw = canvas()
    shares = [0.4, 0.35, 0.25]
    colors = ["#e45756", "#72b7b2", "#eeca3b"]
    cx, cy = px(25, 50)
    r = min(W * 0.5, H) / 2 * 0.9
    start = -90.0
    for s, c in zip(shares, colors):
        draw.pieslice([cx - r, cy - r, cx + r, cy + r], start, start + 360 * s, fill=c)
        start += 360 * s
    bars(draw, [30, 90, 60, 45], (55, 0, 100, 100), "#b279a2")

    pie = node("0-0", "polar", polar(cx=0.25, r2=0.6), mark="arc", description="a pie with three slices")
    bar = node("0-1", "cartesian", cart(55, 0, 100, 100), mark="rectangle", description="four vertical bars")
    tree = node("0", "cartesian", cart(), [pie, bar], description="a pie beside a bar chart")
    typo = json.loads(json.dumps(tree))
    typo["components"][1]["coordinate"] = "cartesain"

    proportional = dim(stacking=True, anchor="stacking_decided", subdividing=True, size_uniform=False,
                       size_range=[0, 100])
    pie_spec = {
        "data_structure": structure("1D_LIST", 3, "angle"),
        "mark_specification": mark("arc"),
        "layout_specification": {"angle": proportional,
                                 "radius": dim(size_range=[100, 100], anchor_start=0)},
        "non_layout_specification": {"fill": {"scale": "categorical", "options": ["#E45756", "#72B7B2", "#EECA3B"]}},
    }
    wrong_pie = json.loads(json.dumps(pie_spec))
    wrong_pie["data_structure"]["data_size"]["primary"]["dimension"] = "x"
    wrong_pie["layout_specification"] = {"x": proportional, "y": dim(size_range=[100, 100], anchor_start=0)}
    bar_spec = {
        "data_structure": structure("1D_LIST", 4, "x"),
        "mark_specification": mark("rectangle"),
        "layout_specification": {"x": slots(4, 25), "y": value_sized()},
        "non_layout_specification": fill("#B279A2"),
    }
    final = dict(tree)
    final["data_specification"] = {"0-0": pie_spec, "0-1": bar_spec}
    write("composite", {
        "image.png": img,
        "step1.txt": typo,
        "step1-repair.txt": tree,
        "step2a.txt": {"cleaned_dsl": tree, "template_index": []},
        "step3-0-0.txt": wrong_pie,
        "step3-0-0-repair.txt": pie_spec,
        "step3-0-1.txt": bar_spec,
        "final.revis.json": final,
    })


if __name__ == "__main__":
    bar_case()
    small_multiples_case()
    composite_case()
