"""Text formats: Newick, extended Newick, DOT, JSON graph and choice files.

Every writer is a deterministic function of the network, so repeated runs
produce byte-identical output.
"""
from __future__ import annotations

import hashlib
import json
import re
from typing import Mapping

from .analyze import temporal_labeling
from .errors import FingerprintMismatchError, InvalidChoiceError, NewickParseError, StructuralError
from .graph import PhyloNetwork, PhyloTree, label_key, topological_order

GRAPH_FORMAT = "utbn-graph/1"
CHOICE_FORMAT = "utbn-choice/1"

_PLAIN_LABEL = re.compile(r"[A-Za-z0-9_.\-+*/|!?@%&=<>~^$]+")
_DELIMS = set("(),:;[]'") | set(" \t\r\n")


# -- Newick --------------------------------------------------------------


def parse_newick(text: str) -> PhyloTree:
    """Parse a rooted binary Newick string.

    Branch lengths, internal node labels and ``[...]`` comments are accepted
    and discarded.  Raises :class:`NewickParseError` with the offending
    position on malformed or non-binary input.
    """
    pos = 0
    end = len(text)
    edges: list[tuple[int, int]] = []
    labels: dict[int, str] = {}
    seen_labels: set[str] = set()
    frames: list[tuple[int, list[int]]] = []
    num = 0
    node = None

    def skip(i):
        while i < end:
            if text[i].isspace():
                i += 1
            elif text[i] == "[":
                close = text.find("]", i)
                if close < 0:
                    raise NewickParseError("unterminated comment", i)
                i = close + 1
            else:
                break
        return i

    def read_label(i):
        if i < end and text[i] == "'":
            out = []
            i += 1
            while True:
                if i >= end:
                    raise NewickParseError("unterminated quoted label", i)
                if text[i] == "'":
                    if i + 1 < end and text[i + 1] == "'":
                        out.append("'")
                        i += 2
                        continue
                    return "".join(out), i + 1
                out.append(text[i])
                i += 1
        start = i
        while i < end and text[i] not in _DELIMS:
            i += 1
        return text[start:i], i

    def read_length(i):
        i = skip(i)
        if i < end and text[i] == ":":
            i = skip(i + 1)
            start = i
            while i < end and (text[i].isdigit() or text[i] in ".eE+-"):
                i += 1
            if i == start:
                raise NewickParseError("expected a branch length", i)
        return i

    while True:
        pos = skip(pos)
        if pos >= end:
            raise NewickParseError("missing ';'", pos)
        ch = text[pos]
        if node is None:
            if ch == "(":
                frames.append((pos, []))
                pos += 1
                continue
            label, new_pos = read_label(pos)
            if not label and new_pos == pos:
                raise NewickParseError(f"expected a label or '(' but found {ch!r}", pos)
            if label in seen_labels:
                raise NewickParseError(f"duplicate leaf label {label!r}", pos)
            seen_labels.add(label)
            node = num
            num += 1
            labels[node] = label
            pos = read_length(new_pos)
            continue
        if ch == ",":
            if not frames:
                raise NewickParseError("',' outside parentheses", pos)
            frames[-1][1].append(node)
            node = None
            pos += 1
        elif ch == ")":
            if not frames:
                raise NewickParseError("unbalanced ')'", pos)
            start, kids = frames.pop()
            kids.append(node)
            if len(kids) != 2:
                raise NewickParseError(f"non-binary vertex with {len(kids)} children opened", start)
            node = num
            num += 1
            edges += [(node, k) for k in kids]
            _, pos = read_label(skip(pos + 1))
            pos = read_length(pos)
        elif ch == ";":
            if frames:
                raise NewickParseError("unbalanced '('", frames[-1][0])
            if skip(pos + 1) != end:
                raise NewickParseError("trailing characters after ';'", pos + 1)
            break
        else:
            raise NewickParseError(f"unexpected {ch!r}", pos)

    # renumber so the root is vertex 0 and ids follow a pre-order
    kids_of: dict[int, list[int]] = {}
    for u, v in edges:
        kids_of.setdefault(u, []).append(v)
    order = []
    stack = [node]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(reversed(kids_of.get(v, [])))
    new = {v: i for i, v in enumerate(order)}
    return PhyloTree(
        num,
        [(new[u], new[v]) for u, v in edges],
        {new[v]: lab for v, lab in labels.items()},
    )


def _quote(label: str) -> str:
    if _PLAIN_LABEL.fullmatch(label):
        return label
    return "'" + label.replace("'", "''") + "'"


def _min_labels(net: PhyloNetwork) -> list:
    best: list = [None] * net.num_vertices
    for v in reversed(topological_order(net)):
        if not net.children[v]:
            best[v] = label_key(net.labels.get(v, ""))
        else:
            best[v] = min(best[c] for c in net.children[v])
    return best


def to_enewick(net: PhyloNetwork) -> str:
    """Extended Newick: reticulation ``k`` (in vertex-id order) is written
    once in full as ``(...)#Hk`` and once as the bare leaf ``#Hk``."""
    key = _min_labels(net)
    tag = {r: f"#H{k}" for k, r in enumerate(net.reticulations, start=1)}
    written = set()
    out = []
    stack: list = [net.root]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        v = item
        if v in tag and v in written:
            out.append(tag[v])
            continue
        written.add(v)
        kids = sorted(net.children[v], key=lambda c: (key[c], c))
        if not kids:
            out.append(_quote(net.labels.get(v, "")))
            continue
        stack.append(")" + tag.get(v, ""))
        for k, c in enumerate(reversed(kids)):
            if k:
                stack.append(",")
            stack.append(c)
        stack.append("(")
    return "".join(out) + ";"


def to_newick(tree: PhyloNetwork) -> str:
    """Canonical Newick; children are ordered by smallest descendant label."""
    if tree.reticulation_count:
        raise StructuralError("to_newick needs a tree; use to_enewick for networks")
    return to_enewick(tree)


# -- DOT -----------------------------------------------------------------


def _dot_id(v: int) -> str:
    return f"v{v}"


def to_dot(net: PhyloNetwork, choice: Mapping[int, int] | None = None, name: str = "N") -> str:
    """Graphviz source.

    Reticulation edges are dashed.  With ``choice`` the kept edges are drawn
    bold red and the dropped reticulation edges dotted grey.  Vertices with
    equal time labels share a rank, which puts the cross edges side by side.
    """
    lines = [f"digraph {json.dumps(name)} {{", "  node [shape=point, width=0.08];"]
    for v in range(net.num_vertices):
        attrs = []
        if v in net.labels:
            attrs += ["shape=plaintext", f"label={json.dumps(net.labels[v])}"]
        c = net.coord(v)
        if c is not None:
            attrs.append(f"tooltip={json.dumps(' '.join(map(str, c)))}")
        lines.append(f"  {_dot_id(v)}" + (f" [{', '.join(attrs)}];" if attrs else ";"))
    for u, v in net.edges():
        attrs = []
        retic = net.is_reticulation_edge(u, v)
        if choice is not None:
            kept = not retic or choice.get(v) == u
            attrs += ["color=red", "penwidth=2"] if kept else ["style=dotted", "color=gray"]
            if kept and retic:
                attrs.append("style=dashed")
        elif retic:
            attrs.append("style=dashed")
        lines.append(f"  {_dot_id(u)} -> {_dot_id(v)}" + (f" [{', '.join(attrs)}];" if attrs else ";"))
    times = temporal_labeling(net)
    if times:
        groups: dict[int, list[int]] = {}
        for v, t in times.items():
            groups.setdefault(t, []).append(v)
        for t in sorted(groups):
            if len(groups[t]) > 1:
                members = " ".join(_dot_id(v) + ";" for v in sorted(groups[t]))
                lines.append(f"  {{ rank=same; {members} }}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- JSON graph and choice files ------------------------------------------


def _coord_json(net: PhyloNetwork, v: int):
    c = net.coord(v)
    return list(c) if c is not None else ["id", v]


def to_json_graph(net: PhyloNetwork) -> dict:
    vertices = []
    for v in range(net.num_vertices):
        entry = {"id": v, "kind": net.kind(v).value}
        if v in net.labels:
            entry["label"] = net.labels[v]
        if net.coords is not None:
            entry["coord"] = list(net.coords[v])
        vertices.append(entry)
    return {
        "format": GRAPH_FORMAT,
        "vertices": vertices,
        "edges": [[u, v] for u, v in net.edges()],
        "metadata": {"n": len(net.labels), "r": net.reticulation_count},
    }


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def from_json_graph(obj) -> PhyloNetwork:
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("format") != GRAPH_FORMAT:
        raise ValueError(f"expected format {GRAPH_FORMAT!r}, got {obj.get('format')!r}")
    verts = obj["vertices"]
    if [v["id"] for v in verts] != list(range(len(verts))):
        raise ValueError("vertex ids must be dense and listed in order")
    labels = {v["id"]: v["label"] for v in verts if "label" in v}
    coords = None
    if verts and all("coord" in v for v in verts):
        coords = [tuple(v["coord"]) for v in verts]
    return PhyloNetwork(len(verts), [tuple(e) for e in obj["edges"]], labels, coords)


def fingerprint(net: PhyloNetwork) -> str:
    return hashlib.sha256(dumps(to_json_graph(net)).encode("utf-8")).hexdigest()


def choice_to_json(net: PhyloNetwork, choice: Mapping[int, int]) -> dict:
    return {
        "format": CHOICE_FORMAT,
        "fingerprint": fingerprint(net),
        "entries": [
            {"reticulation": _coord_json(net, r), "parent": _coord_json(net, choice[r])}
            for r in sorted(choice)
        ],
    }


def choice_from_json(net: PhyloNetwork, obj) -> dict[int, int]:
    """Read a choice file, rejecting it if it was made for another network."""
    if isinstance(obj, str):
        obj = json.loads(obj)
    if obj.get("format") != CHOICE_FORMAT:
        raise ValueError(f"expected format {CHOICE_FORMAT!r}, got {obj.get('format')!r}")
    if obj.get("fingerprint") != fingerprint(net):
        raise FingerprintMismatchError("choice file fingerprint does not match the network")

    def lookup(c):
        c = tuple(c)
        if c[0] == "id" and net.coords is None:
            return int(c[1])
        try:
            return net.vertex(c)
        except KeyError:
            raise InvalidChoiceError(f"unknown coordinate {list(c)}") from None

    choice = {}
    for e in obj["entries"]:
        r = lookup(e["reticulation"])
        if r in choice:
            raise InvalidChoiceError(f"reticulation {list(e['reticulation'])} listed twice")
        choice[r] = lookup(e["parent"])
    return choice
