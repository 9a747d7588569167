"""Line-oriented workspace files: ``kind name = expression``.

Kinds: group, grouptheory, fieldtheory, field, auto, structure, point,
witness, formula, poly.  Names are unique per kind and may only refer to
names declared on earlier lines.  ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import ake
from .difference import DifferenceStructure, GaussLift, Identity, Twist
from .formulas import parse_formula
from .groups import ConcreteGroup, GroupKind, GroupTheory, R_PLUS, classify_group
from .hahn import FieldHandle, discreteness_gap
from .literals import parse_coeff_list, parse_points, parse_series, split_top
from .values import Value

__all__ = ["ConfigError", "Workspace", "load_workspace"]

KINDS = ("group", "grouptheory", "fieldtheory", "field", "auto", "structure", "point", "witness", "formula", "poly")

_TABLES = {
    "group": "groups",
    "grouptheory": "grouptheories",
    "fieldtheory": "fieldtheories",
    "field": "fields",
    "auto": "autos",
    "structure": "structures",
    "point": "points",
    "witness": "witnesses",
    "formula": "formulas",
    "poly": "polys",
}

_LINE = re.compile(r"^\s*(\w+)\s+([A-Za-z_][\w+\-]*)\s*=\s*(.+?)\s*$")


class ConfigError(ValueError):
    pass


@dataclass
class AutoSpec:
    """An automorphism waiting for the field it will act on."""

    kind: str
    mapping: dict = field(default_factory=dict)
    base: str | None = None
    a_text: str | None = None

    def build(self, ws: Workspace, fh: FieldHandle, name: str):
        if self.kind == "id":
            return Identity(name)
        if self.kind == "twist":
            try:
                return Twist.of(fh.group, self.mapping, name)
            except ValueError as exc:
                raise ConfigError(f"auto {name}: {exc}") from None
        base = ws.autos[self.base].build(ws, fh, self.base)
        a = parse_series(self.a_text, fh)
        try:
            return GaussLift(base, a, name)
        except ValueError as exc:
            raise ConfigError(f"auto {name}: {exc}") from None


@dataclass
class Workspace:
    groups: dict = field(default_factory=dict)
    grouptheories: dict = field(default_factory=lambda: {"R+": R_PLUS})
    fieldtheories: dict = field(default_factory=dict)
    fields: dict = field(default_factory=dict)
    autos: dict = field(default_factory=lambda: {"id": AutoSpec("id")})
    structures: dict = field(default_factory=dict)
    points: dict = field(default_factory=dict)
    witnesses: dict = field(default_factory=dict)
    formulas: dict = field(default_factory=dict)
    polys: dict = field(default_factory=dict)
    _declared: set = field(default_factory=set)

    # loading -------------------------------------------------------------

    def load_text(self, text: str, source: str = "<config>") -> Workspace:
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            m = _LINE.match(line)
            if not m:
                raise ConfigError(f"{source}:{lineno}: expected 'kind name = expression'")
            kind, name, expr = m.groups()
            if kind not in KINDS:
                raise ConfigError(f"{source}:{lineno}: unknown kind {kind!r}")
            if (kind, name) in self._declared:
                raise ConfigError(f"{source}:{lineno}: {kind} {name!r} declared twice")
            try:
                getattr(self, f"_decl_{kind}")(name, expr)
            except ConfigError as exc:
                raise ConfigError(f"{source}:{lineno}: {exc}") from None
            except ValueError as exc:
                raise ConfigError(f"{source}:{lineno}: {exc}") from None
            self._declared.add((kind, name))
        return self

    def load(self, path: str | Path) -> Workspace:
        return self.load_text(Path(path).read_text(), str(path))

    # declarations ----------------------------------------------------------

    def _decl_group(self, name, expr):
        self.groups[name] = self._concrete(expr)

    def _concrete(self, expr: str) -> ConcreteGroup:
        m = re.fullmatch(r"<(.*)>", expr.strip())
        if not m:
            raise ConfigError(f"groups are written <g1, g2, ...>, got {expr!r}")
        gens = [Fraction(g.strip()) for g in split_top(m.group(1))]
        if not gens or any(g <= 0 for g in gens):
            raise ConfigError("group generators must be positive rationals")
        return ConcreteGroup.of(*gens)

    def _decl_grouptheory(self, name, expr):
        self.grouptheories[name] = self.group_theory(expr, declare=name)

    def group_theory(self, expr: str, declare: str | None = None) -> GroupTheory:
        expr = expr.strip()
        words = expr.split()
        if expr in self.grouptheories:
            return self.grouptheories[expr]
        if expr in self.groups:
            return classify_group(self.groups[expr])
        if expr.startswith("<"):
            return classify_group(self._concrete(expr))
        m = re.fullmatch(r"th\((.*)\)", expr)
        if m:
            return self.group_theory(m.group(1))
        if words == ["trivial"]:
            return GroupTheory.trivial()
        if words == ["discrete"]:
            return GroupTheory.discrete()
        if words and words[0] == "dense":
            if words[1:] == ["divisible"]:
                return GroupTheory.dense(0, label=declare)
            m = re.fullmatch(r"dense\s+default=(\S+)(?:\s+except\s+(.*))?", expr)
            if not m:
                raise ConfigError(f"cannot read group theory {expr!r}")
            default = _invariant(m.group(1))
            exc = []
            for item in (m.group(2) or "").replace(",", " ").split():
                p, _, v = item.partition(":")
                exc.append((int(p), _invariant(v)))
            return GroupTheory.dense(default, tuple(exc), label=declare)
        raise ConfigError(f"unknown group or group theory {expr!r}")

    def _decl_fieldtheory(self, name, expr):
        self.fieldtheories[name] = self.field_theory(expr, declare=name)

    def field_theory(self, expr: str, declare: str | None = None):
        expr = expr.strip()
        if expr in self.fieldtheories:
            return self.fieldtheories[expr]
        builtin = {
            "Q": ake.Q,
            "ACF0": ake.ACF0,
            "C": ake.ACF0,
            "RCF": ake.RCF,
            "R": ake.RCF,
            "PF": ake.PSEUDOFINITE,
            "pseudofinite": ake.PSEUDOFINITE,
        }
        if expr in builtin:
            return builtin[expr]
        m = re.fullmatch(r"(\w+)\((.*)\)", expr)
        if not m:
            raise ConfigError(f"unknown field theory {expr!r}")
        head, body = m.groups()
        args = split_top(body)
        if head == "hahn":
            if len(args) != 2:
                raise ConfigError("hahn(l, G) takes two arguments")
            return ake.Hahn(self.field_theory(args[0]), self.group_theory(args[1]))
        if head == "padic":
            return ake.padic_closed(int(args[0]))
        if head == "laurent":
            return ake.laurent_over(self.field_theory(args[0]))
        if head == "numberfield":
            return ake.number_field(args[0] if args else "Q")
        if head == "custom":
            flags = {}
            for a in args:
                k, _, v = a.partition("=")
                k = {"fixed": "fixed_point", "real": "formally_real"}.get(k.strip(), k.strip())
                if k not in ake.Flags.__dataclass_fields__:
                    raise ConfigError(f"unknown flag {k!r}")
                flags[k] = {"yes": True, "no": False, "unknown": None}[v.strip()]
            return ake.custom(declare or "custom", **flags)
        raise ConfigError(f"unknown field theory constructor {head!r}")

    def _decl_field(self, name, expr):
        m = re.fullmatch(r"\((.*)\)", expr.strip())
        if not m:
            raise ConfigError("fields are written (group: G, residue: l) or (dg: v, residue: l)")
        parts = {}
        for item in split_top(m.group(1)):
            k, _, v = item.partition(":")
            parts[k.strip()] = v.strip()
        if "residue" not in parts:
            raise ConfigError("a field needs a residue theory")
        res = self.field_theory(parts["residue"])
        if "dg" in parts:
            dg = Fraction(parts["dg"])
            if not 0 <= dg < 1:
                raise ConfigError("dg must lie in [0, 1) for a discrete or trivial field")
            from .values import ZERO

            self.fields[name] = ake.MVFDescriptor(res, dg=ZERO if dg == 0 else Value.from_rational(dg), name=name)
            return
        g = parts.get("group")
        if g is None:
            raise ConfigError("a field needs a group or a dg")
        th = self.group_theory(g)
        if th.kind is not GroupKind.DENSE:
            if g in self.groups or g.startswith("<"):
                conc = self.groups.get(g) or self._concrete(g)
                dg = discreteness_gap(FieldHandle(conc))
                self.fields[name] = ake.MVFDescriptor(res, dg=dg, name=name)
                return
            raise ConfigError(f"{g} is not dense; give the field's dg instead")
        self.fields[name] = ake.MVFDescriptor(res, group=th, name=name)

    def _decl_auto(self, name, expr):
        expr = expr.strip()
        if expr == "id":
            self.autos[name] = AutoSpec("id")
            return
        m = re.fullmatch(r"twist\((.*)\)", expr)
        if m:
            mapping = {}
            for item in split_top(m.group(1)):
                g, _, u = item.partition("=>")
                if not u:
                    raise ConfigError("twist entries are written generator => value")
                mapping[Value.from_rational(Fraction(g.strip()))] = Fraction(u.strip())
            self.autos[name] = AutoSpec("twist", mapping)
            return
        m = re.fullmatch(r"gauss\((.*)\)", expr)
        if m:
            args = split_top(m.group(1))
            if len(args) != 2 or not args[1].startswith("a"):
                raise ConfigError("gauss lifts are written gauss(base, a = series)")
            base = args[0]
            if base not in self.autos:
                raise ConfigError(f"unknown automorphism {base!r}")
            self.autos[name] = AutoSpec("gauss", base=base, a_text=args[1].split("=", 1)[1])
            return
        raise ConfigError(f"unknown automorphism {expr!r}")

    def _decl_structure(self, name, expr):
        m = re.fullmatch(r"hahn\((.*)\)", expr.strip())
        if not m:
            raise ConfigError("structures are written hahn(group[, automorphism][, roots])")
        args = split_top(m.group(1))
        if not args:
            raise ConfigError("a structure needs a group")
        g = args[0]
        conc = self.groups.get(g) if g in self.groups else self._concrete(g)
        roots = "roots" in args[1:]
        autos = [a for a in args[1:] if a != "roots"]
        fh = FieldHandle(conc, roots)
        auto = autos[0] if autos else "id"
        if auto not in self.autos:
            raise ConfigError(f"unknown automorphism {auto!r}")
        sigma = self.autos[auto].build(self, fh, auto)
        self.structures[name] = DifferenceStructure(fh, sigma, gauss=isinstance(sigma, GaussLift), name=name)

    def _decl_point(self, name, expr):
        self.points[name] = expr

    def _decl_witness(self, name, expr):
        self.witnesses[name] = expr

    def _decl_formula(self, name, expr):
        self.formulas[name] = parse_formula(expr)

    def _decl_poly(self, name, expr):
        self.polys[name] = expr

    # lookups -------------------------------------------------------------

    def get(self, kind: str, name: str):
        table = getattr(self, _TABLES.get(kind, ""), None)
        if table is None or name not in table:
            raise ConfigError(f"unknown {kind} {name!r}")
        return table[name]

    def point(self, text: str, structure):
        if text in self.points:
            text = self.points[text]
        pts = parse_points(text, structure)
        if len(pts) != 1:
            raise ConfigError(f"expected one point, got {len(pts)}")
        return pts[0]

    def witness_points(self, name: str, structure):
        return parse_points(self.get("witness", name), structure)

    def coeff_list(self, text: str, fh: FieldHandle):
        if text in self.polys:
            text = self.polys[text]
        return parse_coeff_list(text, fh)


def _invariant(text: str):
    text = text.strip()
    if text in ("inf", "infinite"):
        return float("inf")
    return int(text)


def load_workspace(paths=(), text: str | None = None) -> Workspace:
    ws = Workspace()
    for p in paths:
        ws.load(p)
    if text:
        ws.load_text(text)
    return ws
