"""Instance files, JSON run reports, CSV tables and DOT export.

Rationals are always written as ``"p/q"`` (or integer) strings. JSON output
uses sorted keys and carries no timestamps, so equal inputs give equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from .analysis import DEFAULT_PATH_CAP, PathRealization, realized_paths
from .equilibrium import SolvedGame, TieBreakRule
from .greedy import GreedyProfile
from .lattice import Node, all_nodes
from .reports import CheckReport
from .valuations import Instance, as_fraction

FORMAT_VERSION = 1


class InputError(ValueError):
    """Malformed or invalid user input (CLI exit code 2)."""


def rat(q: Fraction) -> str:
    return str(q)


def _reject_float(text: str) -> Any:
    raise InputError(f"float literal {text} in instance file; write rationals as \"p/q\" strings")


def _parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, float):
        raise InputError(f"{where}: float {value!r} is not exact")
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise InputError(f"{where}: {exc}") from None


def instance_from_dict(data: Any) -> tuple[Instance, TieBreakRule | None]:
    """Parse the decoded JSON of an instance file; returns the instance and optional tie rule."""
    if not isinstance(data, dict):
        raise InputError("instance file must hold a JSON object")
    missing = [k for k in ("T", "v1", "v2") if k not in data]
    if missing:
        raise InputError(f"instance file lacks field(s) {', '.join(missing)}")
    T = data["T"]
    if isinstance(T, bool) or not isinstance(T, int) or T < 1:
        raise InputError(f"T must be a positive integer, got {T!r}")
    values = {}
    for key in ("v1", "v2"):
        seq = data[key]
        if not isinstance(seq, list):
            raise InputError(f"{key} must be an array")
        if len(seq) != T:
            raise InputError(f"{key} has {len(seq)} entries but T = {T}")
        values[key] = [_parse_rational(v, f"{key}[{k}]") for k, v in enumerate(seq)]
    name = data.get("name", "")
    if not isinstance(name, str):
        raise InputError("name must be a string")
    try:
        inst = Instance.of(values["v1"], values["v2"], name=name)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    return inst, _parse_tie(data.get("tie"))


def _parse_tie(spec: Any) -> TieBreakRule | None:
    if spec is None:
        return None
    try:
        if isinstance(spec, str):
            return TieBreakRule.parse(spec)
        if isinstance(spec, dict):
            rule = str(spec.get("rule", "")).lower()
            if rule in ("q", "constant"):
                return TieBreakRule.constant(_parse_rational(spec.get("q"), "tie.q"))
            return TieBreakRule.parse(rule)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    raise InputError(f"unrecognised tie spec {spec!r}")


def instance_to_dict(inst: Instance, tie: TieBreakRule | None = None) -> dict[str, Any]:
    out: dict[str, Any] = {
        "T": inst.T,
        "v1": [rat(v) for v in inst.v1.increments],
        "v2": [rat(v) for v in inst.v2.increments],
    }
    if inst.name:
        out["name"] = inst.name
    if tie is not None:
        if tie.table:
            raise ValueError("per-node tie tables are not representable in instance files")
        out["tie"] = {"rule": "q", "q": rat(tie.q)}
    return out


def parse_instance(text: str) -> tuple[Instance, TieBreakRule | None]:
    try:
        data = json.loads(text, parse_float=_reject_float)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from None
    return instance_from_dict(data)


def serialize_instance(inst: Instance, tie: TieBreakRule | None = None) -> str:
    return dumps(instance_to_dict(inst, tie))


def bundled_names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files("seqauction").joinpath("data").iterdir()
                  if p.name.endswith(".json"))


def load_instance(source: str | os.PathLike) -> tuple[Instance, TieBreakRule | None]:
    """Read an instance from a path, or from a bundled example name like ``ex1``."""
    path = Path(source)
    if path.exists():
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc}") from None
    elif str(source) in bundled_names():
        text = resources.files("seqauction").joinpath("data", f"{source}.json").read_text(encoding="utf-8")
    else:
        raise InputError(f"{source}: no such file or bundled example (bundled: {', '.join(bundled_names())})")
    return parse_instance(text)


def dumps(data: Any) -> str:
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=True) + "\n"


def write_atomic(path: str | os.PathLike, text: str | bytes) -> Path:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8") if isinstance(text, str) else text
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def _node_key(x: Node) -> str:
    return f"{x.x1},{x.x2}"


def solved_table(solved: SolvedGame) -> list[dict[str, Any]]:
    rows = []
    for x in sorted(all_nodes(solved.T)):
        row: dict[str, Any] = {"node": _node_key(x), "t": x.t,
                               "u1": rat(solved.u(1, x)), "u2": rat(solved.u(2, x))}
        if not x.is_terminal:
            row.update(b1=rat(solved.bid(1, x)), b2=rat(solved.bid(2, x)),
                       win_prob1=rat(solved.win_prob(1, x)), price=rat(solved.price(x)))
        rows.append(row)
    return rows


def greedy_table(profile: GreedyProfile) -> list[dict[str, Any]]:
    rows = []
    for x in sorted(all_nodes(profile.instance.T)):
        row: dict[str, Any] = {"node": _node_key(x), "t": x.t}
        for i in (1, 2):
            e = profile.entry(i, x)
            row[f"f{i}"] = e.f
            row[f"mu{i}"] = rat(e.mu)
            row[f"kappa{i}"] = e.kappa
            row[f"beta{i}"] = None if e.beta is None else rat(e.beta)
            row[f"p{i}"] = None if e.p is None else rat(e.p)
            row[f"greedy_bid{i}"] = None if x.is_terminal else rat(profile.bid(i, x))
        rows.append(row)
    return rows


def path_dict(path: PathRealization) -> dict[str, Any]:
    return {
        "nodes": [_node_key(x) for x in path.nodes],
        "winners": list(path.winners),
        "prices": [rat(p) for p in path.prices],
        "probability": rat(path.probability),
    }


def solve_report(
    solved: SolvedGame, profile: GreedyProfile | None = None, checks: dict[str, CheckReport] | None = None,
    welfare: dict[str, Any] | None = None, cap: int = DEFAULT_PATH_CAP, paths: list[PathRealization] | None = None,
) -> dict[str, Any]:
    """Assemble the machine-readable report of one solved game."""
    inst = solved.instance
    paths = paths if paths is not None else realized_paths(solved, cap=cap)
    report: dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "instance": instance_to_dict(inst),
        "mode": solved.mode.value,
        "tie": solved.tie.spec(),
        "root_utilities": [rat(solved.u(1, solved.root)), rat(solved.u(2, solved.root))],
        "nodes": solved_table(solved),
        "paths": [path_dict(p) for p in paths],
    }
    if profile is not None:
        report["greedy"] = greedy_table(profile)
    if checks is not None:
        report["checks"] = {name: r.to_dict() for name, r in sorted(checks.items())}
    if welfare is not None:
        report["welfare"] = welfare
    return report


def rows_to_csv(rows: list[dict[str, Any]], columns: list[str] | None = None) -> str:
    if columns is None:
        columns = []
        for row in rows:
            columns.extend(k for k in row if k not in columns)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", restval="")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
    return buf.getvalue()


def node_table_csv(solved: SolvedGame, profile: GreedyProfile | None = None) -> str:
    rows = solved_table(solved)
    if profile is not None:
        for row, g in zip(rows, greedy_table(profile)):
            row.update({k: v for k, v in g.items() if k not in ("node", "t")})
    return rows_to_csv(rows)


def price_trajectory_rows(paths: list[PathRealization]) -> list[dict[str, Any]]:
    rows = []
    for n, path in enumerate(paths):
        for r, (x, w, p) in enumerate(zip(path.nodes, path.winners, path.prices), start=1):
            rows.append({"path": n, "round": r, "price": rat(p), "winner": w, "node": _node_key(x),
                         "probability": rat(path.probability)})
    return rows


def price_trajectory_csv(paths: list[PathRealization]) -> str:
    return rows_to_csv(price_trajectory_rows(paths),
                       ["path", "round", "price", "winner", "node", "probability"])


def to_dot(solved: SolvedGame, cap: int = DEFAULT_PATH_CAP) -> str:
    """Lattice digraph: nodes carry "(x1,x2)--t" and utilities, arcs carry bids.

    The arc to ``x + e_i`` is labelled with buyer i's bid, solid when buyer i
    wins with positive probability and dotted otherwise; arcs on a realised
    equilibrium path are bold.
    """
    on_path = set()
    for path in realized_paths(solved, cap=cap):
        on_path.update(zip(path.nodes, path.nodes[1:]))
    name = solved.instance.name or "instance"
    lines = [f'digraph "{name}" {{', "  rankdir=LR;", "  node [shape=box];"]
    nodes = sorted(all_nodes(solved.T), key=lambda x: (x.x1 + x.x2, x.x1))
    for x in nodes:
        label = f"({x.x1},{x.x2})--{x.t}\\n{solved.u(1, x)} : {solved.u(2, x)}"
        lines.append(f'  "{_node_key(x)}" [label="{label}"];')
    for x in nodes:
        if x.is_terminal:
            continue
        winners = solved.winners(x)
        for i in (1, 2):
            c = x.child(i)
            style = ["solid" if i in winners else "dotted"]
            if (x, c) in on_path:
                style.append("bold")
            lines.append(f'  "{_node_key(x)}" -> "{_node_key(c)}" '
                         f'[label="{solved.bid(i, x)}", style="{",".join(style)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
