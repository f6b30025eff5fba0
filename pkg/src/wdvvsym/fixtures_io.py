"""Structured-text fixture files: parsing, hashing and domain loaders.

Format: one record per block.  A block starts with `[kind name]`; each
following `key = value` line holds an expression string in the kernel
grammar (values may be double-quoted).  `#` starts a comment.
"""
from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .epsfun import EPS_ZERO, EpsFun, EpsParseError, _EpsParser
from .kernel import Expr, KernelError, parse
from .lie import VectorField

PACKAGED_FIXTURES = Path(__file__).parent / "fixtures"
ENV_FIXTURES = "WDVVSYM_FIXTURES"


class FixtureError(KernelError):
    pass


@dataclass
class Block:
    kind: str
    name: str
    fields: dict[str, str]
    source: str

    def get(self, key: str, default: Optional[str] = None) -> Optional[str]:
        return self.fields.get(key, default)

    def require(self, key: str) -> str:
        if key not in self.fields:
            raise FixtureError(f"[{self.kind} {self.name}] in {self.source}: missing {key!r}")
        return self.fields[key]


def fixtures_dir(override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(ENV_FIXTURES)
    if env:
        return Path(env)
    return PACKAGED_FIXTURES


def parse_fixture_text(text: str, source: str) -> list[Block]:
    blocks: list[Block] = []
    current: Optional[Block] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise FixtureError(f"{source}:{lineno}: malformed block header")
            head = line[1:-1].strip().split(None, 1)
            kind = head[0]
            name = head[1] if len(head) > 1 else ""
            current = Block(kind, name, {}, source)
            blocks.append(current)
            continue
        if "=" not in line:
            raise FixtureError(f"{source}:{lineno}: expected key = value")
        if current is None:
            raise FixtureError(f"{source}:{lineno}: data outside a block")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if value.startswith('"') and value.endswith('"') and len(value) >= 2:
            value = value[1:-1]
        if key in current.fields:
            raise FixtureError(f"{source}:{lineno}: duplicate key {key!r}")
        current.fields[key] = value
    return blocks


def load_file(path: Path) -> list[Block]:
    return parse_fixture_text(path.read_text(encoding="utf-8"), str(path))


def fixtures_hash(directory: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(directory.glob("*.txt")):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()


# ---------------------------------------------------------------------------
# basis-combination cells ("v3 - eps*v1", "exp(3*eps/2)*v7", "2*v8", "0")
# ---------------------------------------------------------------------------


class _CellParser(_EpsParser):
    """Eps-function parser extended with basis symbols v1..v10; values are
    dicts basis index -> EpsFun, plain EpsFun standing for scalars."""

    def atom(self):
        kind, val = self.peek()
        if kind == "name" and val.startswith("v") and val[1:].isdigit():
            self.next()
            idx = int(val[1:])
            if not 1 <= idx <= 10:
                raise EpsParseError(f"basis symbol out of range: {val}")
            return {idx: EpsFun.const(1)}
        return super().atom()

    def sum(self):
        out = self.product()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                t = self.product()
                out = _cell_add(out, _cell_neg(t) if val == "-" else t)
            else:
                return out

    def product(self):
        out = self.unary()
        while True:
            kind, val = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                f = self.unary()
                out = _cell_mul(out, f) if val == "*" else _cell_div(out, f)
            else:
                return out

    def unary(self):
        kind, val = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return _cell_neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        kind, val = self.peek()
        if kind == "op" and val == "^":
            if isinstance(base, dict):
                raise EpsParseError("cannot raise a basis combination to a power")
            self.next()
            k2, v2 = self.next()
            if k2 != "int":
                raise EpsParseError("expected integer exponent")
            from .epsfun import EPS_ONE

            out = EPS_ONE
            for _ in range(int(v2)):
                out = out.mul(base)
            return out
        return base


def _cell_neg(a):
    if isinstance(a, dict):
        return {k: v.neg() for k, v in a.items()}
    return a.neg()


def _cell_add(a, b):
    if isinstance(a, dict) != isinstance(b, dict):
        raise EpsParseError("cannot add a scalar to a basis combination")
    if isinstance(a, dict):
        out = dict(a)
        for k, v in b.items():
            out[k] = out.get(k, EPS_ZERO).add(v)
        return out
    return a.add(b)

def _cell_mul(a, b):
    if isinstance(a, dict) and isinstance(b, dict):
        raise EpsParseError("cannot multiply basis combinations")
    if isinstance(a, dict):
        return {k: v.mul(b) for k, v in a.items()}
    if isinstance(b, dict):
        return {k: a.mul(v) for k, v in b.items()}
    return a.mul(b)


def _cell_div(a, b):
    if isinstance(b, dict):
        raise EpsParseError("cannot divide by a basis combination")
    from .epsfun import _as_rat

    inv = 1 / _as_rat(b)
    if isinstance(a, dict):
        return {k: v.scale(inv) for k, v in a.items()}
    return a.scale(inv)


def parse_cell(text: str) -> dict[int, EpsFun]:
    val = _CellParser(text).parse()
    if isinstance(val, dict):
        return {k: v for k, v in val.items() if not v.is_zero()}
    if val.is_zero():
        return {}
    raise EpsParseError(f"cell {text!r} is a bare scalar, not a basis combination")


def cell_to_fraction_vector(cell: dict[int, EpsFun], dim: int = 10) -> list[Fraction]:
    out = [Fraction(0)] * dim
    for idx, fun in cell.items():
        parts = fun.parts
        if len(parts) != 1 or parts[0][0] != 0 or parts[0][1] != ((0, parts[0][1][0][1]),):
            raise FixtureError("commutator cell must have constant coefficients")
        out[idx - 1] = parts[0][1][0][1]
    return out


# ---------------------------------------------------------------------------
# domain loaders
# ---------------------------------------------------------------------------

F_DECL = {"f": ("x", "y")}
F_BIG_DECL = {"F": ("y", "t")}
PHI_DECL = {"phi": ("z",)}


def load_generators(directory: Path) -> list[VectorField]:
    blocks = load_file(directory / "generators.txt")
    gens: dict[int, VectorField] = {}
    for b in blocks:
        if b.kind != "generator":
            continue
        idx = int(b.name)
        decl = {"f": ("x", "y")}
        gens[idx] = VectorField(
            parse(b.require("xi"), functions=decl),
            parse(b.require("eta"), functions=decl),
            parse(b.require("phi"), functions=decl),
        )
    if sorted(gens) != list(range(1, 11)):
        raise FixtureError("generators.txt must define generators 1..10")
    return [gens[i] for i in range(1, 11)]


def load_commutator_table(directory: Path) -> dict[tuple[int, int], list[Fraction]]:
    blocks = load_file(directory / "table_commutators.txt")
    out: dict[tuple[int, int], list[Fraction]] = {}
    for b in blocks:
        if b.kind != "commutators":
            continue
        for key, val in b.fields.items():
            parts = key.split("_")
            if len(parts) != 3 or parts[0] != "c":
                raise FixtureError(f"bad commutator key {key!r}")
            i, j = int(parts[1]), int(parts[2])
            out[(i, j)] = cell_to_fraction_vector(parse_cell(val))
    if len(out) != 100:
        raise FixtureError(f"expected 100 commutator cells, found {len(out)}")
    return out


def load_adjoint_table(directory: Path) -> dict[tuple[int, int], dict[int, EpsFun]]:
    blocks = load_file(directory / "table_adjoint.txt")
    out: dict[tuple[int, int], dict[int, EpsFun]] = {}
    for b in blocks:
        if b.kind != "adjoint":
            continue
        for key, val in b.fields.items():
            parts = key.split("_")
            if len(parts) != 3 or parts[0] != "a":
                raise FixtureError(f"bad adjoint key {key!r}")
            i, j = int(parts[1]), int(parts[2])
            out[(i, j)] = parse_cell(val)
    if len(out) != 100:
        raise FixtureError(f"expected 100 adjoint cells, found {len(out)}")
    return out


@dataclass
class OptimalFamily:
    name: str
    coeffs: dict[int, Expr]  # basis index -> coefficient in the parameters
    parameters: tuple[str, ...]


def load_optimal_system(directory: Path) -> list[OptimalFamily]:
    blocks = load_file(directory / "optimal_system.txt")
    fams = []
    for b in blocks:
        if b.kind != "family":
            continue
        params = tuple(p for p in b.get("parameters", "").replace(",", " ").split() if p)
        coeffs: dict[int, Expr] = {}
        for key, val in b.fields.items():
            if key.startswith("v"):
                coeffs[int(key[1:])] = parse(val, strict_symbols=set(params) | {"0"})
        fams.append(OptimalFamily(b.name, coeffs, params))
    return fams


@dataclass
class ReductionFixture:
    name: str
    target: Expr
    parameters: tuple[str, ...]
    order: int


def load_reduction_targets(directory: Path) -> dict[str, ReductionFixture]:
    blocks = load_file(directory / "reductions.txt")
    out = {}
    for b in blocks:
        if b.kind != "reduction":
            continue
        params = tuple(p for p in b.get("parameters", "").replace(",", " ").split() if p)
        target = parse(b.require("target"), functions=PHI_DECL)
        out[b.name] = ReductionFixture(b.name, target, params, int(b.get("order", "3")))
    return out


@dataclass
class FirstIntegralFixture:
    name: str
    reduction: str
    integral: Expr
    parameters: tuple[str, ...]
    mu: Optional[Fraction]


def load_first_integrals(directory: Path) -> list[FirstIntegralFixture]:
    blocks = load_file(directory / "first_integrals.txt")
    out = []
    for b in blocks:
        if b.kind != "integral":
            continue
        params = tuple(p for p in b.get("parameters", "").replace(",", " ").split() if p)
        mu = Fraction(b.get("mu")) if b.get("mu") else None
        out.append(
            FirstIntegralFixture(
                b.name,
                b.require("reduction"),
                parse(b.require("value"), functions=PHI_DECL),
                params,
                mu,
            )
        )
    return out


@dataclass
class OdeSolutionFixture:
    name: str
    reduction: str
    phi: Expr
    parameters: tuple[str, ...]
    constraint: Optional[tuple[str, Expr]]
    mu: Optional[Fraction]


def load_ode_solutions(directory: Path) -> list[OdeSolutionFixture]:
    blocks = load_file(directory / "ode_solutions.txt")
    out = []
    for b in blocks:
        if b.kind != "solution":
            continue
        params = tuple(p for p in b.get("parameters", "").replace(",", " ").split() if p)
        constraint = None
        if b.get("constraint_var"):
            constraint = (
                b.require("constraint_var"),
                parse(b.require("constraint_value")),
            )
        roots = {}
        if b.get("root_name"):
            roots[b.require("root_name")] = parse(b.require("root_square"))
        mu = Fraction(b.get("mu")) if b.get("mu") else None
        out.append(
            OdeSolutionFixture(
                b.name,
                b.require("reduction"),
                parse(b.require("phi"), functions=PHI_DECL, roots=roots),
                params,
                constraint,
                mu,
            )
        )
    return out


@dataclass
class SolutionRow:
    """One row of the solutions table, pinned to a master coordinate chart.

    Modes: 'direct' forms are differentiated in their native variables and
    then pulled back through the maps; 'chart' forms are pulled back first
    and differentiated through the inverse Jacobian.
    """

    label: str
    coords: tuple[str, str]
    map_x: Expr
    map_y: Expr
    map_t: Expr
    f: Expr
    f_mode: str
    F: Optional[Expr]
    F_mode: str
    parameters: tuple[str, ...]
    root: Optional[tuple[str, Expr]]
    constraint: Optional[tuple[str, Expr]]
    mirror_of: Optional[str]
    core: bool
    note: str
    quasi_homogeneous: bool
    printed: dict[str, Expr] = field(default_factory=dict)


def load_solution_rows(directory: Path) -> list[SolutionRow]:
    blocks = load_file(directory / "solutions_table.txt")
    rows = []
    for b in blocks:
        if b.kind != "row":
            continue
        params = tuple(p for p in b.get("parameters", "").replace(",", " ").split() if p)
        roots = {}
        root = None
        if b.get("root_name"):
            root = (b.require("root_name"), parse(b.require("root_square")))
            roots[root[0]] = root[1]
        coords = tuple(c.strip() for c in b.require("coords").split(","))
        if len(coords) != 2:
            raise FixtureError(f"row {b.name}: coords must name two variables")

        def rparse(text: str) -> Expr:
            return parse(text, roots=roots)

        constraint = None
        if b.get("constraint_var"):
            constraint = (b.require("constraint_var"), rparse(b.require("constraint_value")))
        fexpr = rparse(b.require("f"))
        Fexpr = rparse(b.require("F")) if b.get("F") else None
        printed = {
            key[len("printed_"):]: rparse(val)
            for key, val in b.fields.items()
            if key.startswith("printed_")
        }
        rows.append(
            SolutionRow(
                label=b.name,
                coords=coords,  # type: ignore[arg-type]
                map_x=rparse(b.require("map_x")),
                map_y=rparse(b.require("map_y")),
                map_t=rparse(b.require("map_t")),
                f=fexpr,
                f_mode=b.get("f_mode", "direct"),
                F=Fexpr,
                F_mode=b.get("F_mode", "direct"),
                parameters=params,
                root=root,
                constraint=constraint,
                mirror_of=b.get("mirror_of") or None,
                core=b.get("core", "no") == "yes",
                note=b.get("note", ""),
                quasi_homogeneous=b.get("quasi_homogeneous", "no") == "yes",
                printed=printed,
            )
        )
    return rows
