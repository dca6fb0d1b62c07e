"""AST node types for epistemic strategy formulas.

Core nodes are the ones the checker evaluates.  Derived nodes are produced by
the parser and removed by :func:`eslcheck.formula.expand_derived`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Sigma:
    """The strategic agent whose local state is ``name``'s strategy."""

    name: str

    def __str__(self) -> str:
        return f"sigma({self.name})"


@dataclass(frozen=True)
class Env:
    """The environment agent; its local state is the full environment state."""

    def __str__(self) -> str:
        return "env"


ExtendedAgent = Union[Base, Sigma, Env]
Group = frozenset  # frozenset[ExtendedAgent]

_KIND_ORDER = {Base: 0, Sigma: 1, Env: 2}


def agent_sort_key(w: ExtendedAgent) -> tuple[int, str]:
    return _KIND_ORDER[type(w)], getattr(w, "name", "")


def sorted_group(group) -> list[ExtendedAgent]:
    return sorted(group, key=agent_sort_key)


class Formula:
    __slots__ = ()

    def children(self) -> tuple[Formula, ...]:
        return ()

    def __str__(self) -> str:
        from eslcheck.formula.parser import unparse

        return unparse(self)


# -- core --------------------------------------------------------------------


@dataclass(frozen=True)
class Prop(Formula):
    name: str


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class AX(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class EX(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class AU(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class EU(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True)
class D(Formula):
    """Distributed knowledge; the empty group is the universal modality."""

    group: Group
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class C(Formula):
    """Common knowledge; the empty group is the identity modality."""

    group: Group
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class ExistsG(Formula):
    """There is a global state of the system, named ``var``, making ``sub`` true."""

    var: str
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class LocEq(Formula):
    """``who`` has the same local state here as at the global state ``var``."""

    who: ExtendedAgent
    var: str


CORE_TYPES = (Prop, TrueF, FalseF, Not, And, Or, Implies, AX, EX, AU, EU, D, C, ExistsG, LocEq)


# -- derived -----------------------------------------------------------------


@dataclass(frozen=True)
class EF(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class AF(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class EG(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class AG(Formula):
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Knows(Formula):
    who: ExtendedAgent
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class Everyone(Formula):
    group: Group
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class ForallG(Formula):
    var: str
    sub: Formula

    def children(self):
        return (self.sub,)


@dataclass(frozen=True)
class LocGroup(Formula):
    """Conjunction of :class:`LocEq` over a group."""

    group: Group
    var: str


@dataclass(frozen=True)
class Coalition(Formula):
    """``<<H>>_K{G} sub``: some strategy of ``coalition`` makes G know ``sub``.

    ``kind`` is one of ``"C"``, ``"D"``, ``"E"``.  Only the common-knowledge
    form has a published encoding; D and E follow the same pattern by analogy.
    """

    coalition: tuple[str, ...]
    kind: str
    group: Group
    sub: Formula

    def children(self):
        return (self.sub,)


def subformulas(f: Formula):
    """Yield every node of ``f`` in post-order."""
    for c in f.children():
        yield from subformulas(c)
    yield f


def conjunction(parts: list[Formula]) -> Formula:
    if not parts:
        return TrueF()
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out
