"""CNF formulas, DIMACS I/O, restriction and the truth-table oracle.

Literals are DIMACS integers (``3`` is x3, ``-3`` is not x3).  A clause is a
tuple of literals sorted by variable, which is also the canonical order used
when writing DIMACS, so ``parse_dimacs(emit_dimacs(f)) == f``.

Subfunction equality is semantic: two formulas are compared through their
truth tables, which are Python integers used as bitsets.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

from .config import DEFAULT_CAPS, check_cap

Clause = Tuple[int, ...]
Assignment = Dict[int, bool]


class DimacsError(ValueError):
    pass


class Literal(NamedTuple):
    var: int
    polarity: bool

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        return cls(abs(lit), lit > 0)

    def to_int(self) -> int:
        return self.var if self.polarity else -self.var


def _normalize_clause(lits: Iterable[int], num_vars: int) -> Clause:
    seen = set()
    for lit in lits:
        lit = int(lit)
        if lit == 0:
            raise ValueError("0 is not a literal")
        if abs(lit) > num_vars:
            raise DimacsError(f"literal {lit} out of range 1..{num_vars}")
        if -lit in seen:
            raise DimacsError(f"clause contains both {abs(lit)} and {-abs(lit)}")
        seen.add(lit)
    return tuple(sorted(seen, key=abs))


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: Tuple[Clause, ...]
    names: Optional[Tuple[str, ...]] = None

    @classmethod
    def make(cls, num_vars, clauses, names=None):
        if names is not None and len(names) != num_vars:
            raise ValueError("need exactly one name per variable")
        return cls(
            num_vars,
            tuple(_normalize_clause(c, num_vars) for c in clauses),
            tuple(names) if names is not None else None,
        )

    @classmethod
    def false(cls, num_vars=0, names=None):
        return cls(num_vars, ((),), names)

    @classmethod
    def true(cls, num_vars=0, names=None):
        return cls(num_vars, (), names)

    @property
    def is_false(self):
        return any(len(c) == 0 for c in self.clauses)

    @property
    def is_true(self):
        return not self.clauses

    def occurring_vars(self):
        return sorted({abs(lit) for c in self.clauses for lit in c})

    def name(self, var):
        return self.names[var - 1] if self.names else f"x{var}"

    def var_by_name(self, name):
        if self.names and name in self.names:
            return self.names.index(name) + 1
        if name.startswith("x") and name[1:].isdigit():
            return int(name[1:])
        if name.isdigit():
            return int(name)
        raise KeyError(f"unknown variable {name!r}")

    def to_json(self):
        return {
            "num_vars": self.num_vars,
            "clauses": [list(c) for c in self.clauses],
            "names": list(self.names) if self.names else None,
        }


def parse_dimacs(text: Union[str, bytes]) -> Cnf:
    if isinstance(text, bytes):
        text = text.decode()
    header = None
    names: Dict[int, str] = {}
    tokens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split(maxsplit=3)
            if len(parts) == 4 and parts[1] == "name":
                names[int(parts[2])] = parts[3]
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise DimacsError(f"line {lineno}: malformed header {line!r}") from None
            if min(header) < 0:
                raise DimacsError(f"line {lineno}: negative counts in header")
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        try:
            tokens.extend(int(t) for t in line.split())
        except ValueError:
            raise DimacsError(f"line {lineno}: non-integer token") from None
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    num_vars, num_clauses = header
    clauses = []
    current = []
    for tok in tokens:
        if tok == 0:
            clauses.append(current)
            current = []
        else:
            current.append(tok)
    if current:
        raise DimacsError("last clause is not terminated by 0")
    if len(clauses) != num_clauses:
        raise DimacsError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    name_list = None
    if names:
        name_list = [names.get(i, f"x{i}") for i in range(1, num_vars + 1)]
    return Cnf.make(num_vars, clauses, name_list)


def emit_dimacs(f: Cnf) -> str:
    lines = []
    if f.names:
        lines += [f"c name {i} {n}" for i, n in enumerate(f.names, 1)]
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    lines += [" ".join(map(str, c + (0,))) for c in f.clauses]
    return "\n".join(lines) + "\n"


def cnf_to_json(f: Cnf) -> str:
    return json.dumps(f.to_json(), sort_keys=True)


def _as_assignment(a: Union[Mapping[int, bool], Sequence[bool]]) -> Assignment:
    if isinstance(a, Mapping):
        return {int(k): bool(v) for k, v in a.items()}
    return {i: bool(v) for i, v in enumerate(a, 1)}


def restrict(f: Cnf, s: Mapping[int, bool]) -> Cnf:
    """The subfunction F_S, still indexed over the original variables."""
    for var in s:
        if not 1 <= var <= f.num_vars:
            raise KeyError(f"variable {var} is not a variable of the formula")
    out = []
    for clause in f.clauses:
        kept = []
        satisfied = False
        for lit in clause:
            value = s.get(abs(lit))
            if value is None:
                kept.append(lit)
            elif value == (lit > 0):
                satisfied = True
                break
        if satisfied:
            continue
        if not kept:
            return Cnf.false(f.num_vars, f.names)
        out.append(tuple(kept))
    return Cnf(f.num_vars, tuple(out), f.names)


def evaluate(f: Cnf, a: Union[Mapping[int, bool], Sequence[bool]]) -> bool:
    a = _as_assignment(a)
    missing = [v for v in f.occurring_vars() if v not in a]
    if missing:
        raise ValueError(f"assignment leaves variables {missing} unbound")
    return all(any(a[abs(lit)] == (lit > 0) for lit in c) for c in f.clauses)


@lru_cache(maxsize=256)
def var_mask(position: int, width: int) -> int:
    """Bitset over 2**width indices with bit i set iff bit ``position`` of i is 1."""
    step = 1 << position
    pattern = ((1 << step) - 1) << step
    size = step << 1
    total = 1 << width
    while size < total:
        pattern |= pattern << size
        size <<= 1
    return pattern


def full_mask(width: int) -> int:
    return (1 << (1 << width)) - 1


@dataclass(frozen=True)
class TruthTable:
    """Function values indexed little-endian: ``over[j]`` is bit j of the index."""

    over: Tuple[int, ...]
    bits: int

    @property
    def num_vars(self):
        return len(self.over)

    def __len__(self):
        return 1 << len(self.over)

    def __getitem__(self, index):
        return bool((self.bits >> index) & 1)

    def count(self):
        return bin(self.bits).count("1")

    def to_list(self):
        return [self[i] for i in range(len(self))]


def table_bits(f: Cnf, over: Sequence[int]) -> int:
    width = len(over)
    pos = {v: j for j, v in enumerate(over)}
    full = full_mask(width)
    bits = full
    for clause in f.clauses:
        cb = 0
        for lit in clause:
            m = var_mask(pos[abs(lit)], width)
            cb |= m if lit > 0 else full ^ m
            if cb == full:
                break
        bits &= cb
        if not bits:
            break
    return bits


def truth_table(f: Cnf, over: Optional[Sequence[int]] = None, cap: Optional[int] = None) -> TruthTable:
    if over is None:
        over = range(1, f.num_vars + 1)
    over = tuple(over)
    check_cap(len(over), cap or DEFAULT_CAPS.oracle, "truth table variables")
    if len(set(over)) != len(over):
        raise ValueError("duplicate variable in 'over'")
    missing = set(f.occurring_vars()) - set(over)
    if missing:
        raise ValueError(f"variables {sorted(missing)} not covered by 'over'")
    return TruthTable(over, table_bits(f, over))


def primal_graph(f: Cnf):
    from .graphs import Graph

    edges = set()
    for clause in f.clauses:
        vs = [abs(lit) - 1 for lit in clause]
        edges.update((a, b) for i, a in enumerate(vs) for b in vs[i + 1:])
    labels = [f.name(v) for v in range(1, f.num_vars + 1)]
    return Graph.from_edges(f.num_vars, edges, labels)


def incidence_graph(f: Cnf):
    """Variables are vertices ``0..n-1``, clause j is vertex ``n + j``."""
    from .graphs import Graph

    n = f.num_vars
    edges = [(abs(lit) - 1, n + j) for j, c in enumerate(f.clauses) for lit in c]
    labels = [f.name(v) for v in range(1, n + 1)]
    labels += [f"C{j + 1}" for j in range(len(f.clauses))]
    tags = ["variable"] * n + ["clause"] * len(f.clauses)
    return Graph.from_edges(n + len(f.clauses), edges, labels, tags)
