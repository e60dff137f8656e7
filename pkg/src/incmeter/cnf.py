"""Clause-level machinery: variable maps, CNF instances, Tseitin conversion.

Solver variables are positive integers; literals are non-zero integers with
sign for polarity.  Every variable carries a structured semantic name in a
:class:`VarMap` so encodings stay inspectable and debuggable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .kb import (
    And,
    Atom,
    Bottom,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Top,
    fold_constants,
    reduce_connectives,
)

# Variable name tags. Names are tuples whose first element is one of these;
# "aux" marks Tseitin definitions and cardinality registers, everything else
# counts toward an encoding's base signature.
TAG_ATOM = "atom"          # (atom, name)               plain propositional atom
TAG_TRI = "tri"            # (tri, name, "t"|"f"|"b")   three-valued indicator
TAG_VAL = "val"            # (val, site, "t"|"f"|"b")   per-site valuation
TAG_OCC = "occ"            # (occ, name, label)         atom occurrence
TAG_FORGET_TOP = "ftop"    # (ftop, name, label)        occurrence replaced by +
TAG_FORGET_BOT = "fbot"    # (fbot, name, label)        occurrence replaced by -
TAG_BLOCK = "block"        # (block, formula_idx, i)    formula membership in block i
TAG_COPY = "copy"          # (copy, name, i)            per-index atom copy
TAG_OPT = "opt"            # (opt, name)                atom of the chosen world
TAG_INV = "inv"            # (inv, name, i)             inverted-assignment flag
TAG_HIT = "hit"            # (hit, formula_idx)         formula dropped marker
TAG_AUX = "aux"            # (aux, n)


VarName = tuple


class VarMap:
    """Bijection between structured variable names and solver variable ids."""

    def __init__(self) -> None:
        self._by_name: dict[VarName, int] = {}
        self._by_id: dict[int, VarName] = {}
        self._aux_counter = 0

    def __len__(self) -> int:
        return len(self._by_name)

    def __contains__(self, name: VarName) -> bool:
        return name in self._by_name

    def var(self, name: VarName) -> int:
        """Return the id for `name`, allocating a fresh variable if needed."""
        vid = self._by_name.get(name)
        if vid is None:
            vid = len(self._by_name) + 1
            self._by_name[name] = vid
            self._by_id[vid] = name
        return vid

    def fresh_aux(self) -> int:
        self._aux_counter += 1
        return self.var((TAG_AUX, self._aux_counter))

    def id_of(self, name: VarName) -> int:
        return self._by_name[name]

    def name_of(self, vid: int) -> VarName:
        return self._by_id[vid]

    def names(self) -> list[VarName]:
        return list(self._by_name)

    def base_count(self) -> int:
        """Number of non-auxiliary variables allocated so far."""
        return sum(1 for name in self._by_name if name[0] != TAG_AUX)


@dataclass
class CnfInstance:
    num_vars: int
    clauses: list[list[int]]
    varmap: VarMap = field(default_factory=VarMap)

    def validate(self) -> None:
        for clause in self.clauses:
            assert clause, "empty clause"
            assert all(lit != 0 and abs(lit) <= self.num_vars for lit in clause)
            assert not any(-lit in clause for lit in clause), "tautological clause"


def atom_leaf_var(vm: VarMap) -> Callable[[str], int]:
    return lambda name: vm.var((TAG_ATOM, name))


def tseitin_append(
    f: Formula,
    vm: VarMap,
    clauses: list[list[int]],
    leaf_var: Callable[[str], int] | None = None,
    assert_root: bool = True,
) -> int:
    """Append definitional clauses for `f` to `clauses`; return its root literal.

    Every internal connective gets an auxiliary variable constrained by a full
    biconditional (no polarity optimization); negation is folded into literal
    signs.  If `assert_root` is set, the root literal is added as a unit
    clause, making the clause set equisatisfiable with `f`.
    """
    if leaf_var is None:
        leaf_var = atom_leaf_var(vm)
    const_true: list[int] = []

    def emit(clause: list[int]) -> None:
        deduped: list[int] = []
        for lit in clause:
            if -lit in deduped:
                return  # tautology, always satisfied
            if lit not in deduped:
                deduped.append(lit)
        clauses.append(deduped)

    def const_var() -> int:
        if not const_true:
            v = vm.fresh_aux()
            clauses.append([v])
            const_true.append(v)
        return const_true[0]

    def walk(node: Formula) -> int:
        if isinstance(node, Atom):
            return leaf_var(node.name)
        if isinstance(node, Top):
            return const_var()
        if isinstance(node, Bottom):
            return -const_var()
        if isinstance(node, Not):
            return -walk(node.child)
        a = walk(node.left)
        b = walk(node.right)
        v = vm.fresh_aux()
        if isinstance(node, And):
            emit([-v, a])
            emit([-v, b])
            emit([v, -a, -b])
        elif isinstance(node, Or):
            emit([-v, a, b])
            emit([v, -a])
            emit([v, -b])
        elif isinstance(node, Implies):
            emit([-v, -a, b])
            emit([v, a])
            emit([v, -b])
        else:
            assert isinstance(node, Iff)
            emit([-v, -a, b])
            emit([-v, a, -b])
            emit([v, a, b])
            emit([v, -a, -b])
        return v

    def assert_true(node: Formula) -> None:
        # Standard top-level extraction: asserted conjunctions split into
        # their conjuncts, asserted disjunctions/implications become a single
        # clause over their disjuncts' literals, asserted biconditionals
        # become two clauses.  Everything below the top level is definitional.
        if isinstance(node, And):
            assert_true(node.left)
            assert_true(node.right)
        elif isinstance(node, (Or, Implies)):
            clause: list[int] = []
            stack = [node]
            while stack:
                cur = stack.pop()
                if isinstance(cur, Or):
                    stack.append(cur.right)
                    stack.append(cur.left)
                elif isinstance(cur, Implies):
                    stack.append(cur.right)
                    stack.append(Not(cur.left))
                elif isinstance(cur, Not) and isinstance(cur.child, Not):
                    stack.append(cur.child.child)
                else:
                    clause.append(walk(cur))
            emit(clause)
        elif isinstance(node, Iff):
            a = walk(node.left)
            b = walk(node.right)
            if a != b:
                emit([-a, b])
                emit([a, -b])
        else:
            emit([walk(node)])

    if assert_root:
        assert_true(f)
        return 0
    return walk(f)


def tseitin(f: Formula, vm: VarMap | None = None) -> CnfInstance:
    """Equisatisfiable CNF of `f` with the root asserted as a unit clause."""
    if vm is None:
        vm = VarMap()
    clauses: list[list[int]] = []
    tseitin_append(f, vm, clauses)
    return CnfInstance(len(vm), clauses, vm)


# ---------------------------------------------------------------------------
# Equivalence-preserving CNF (distributive laws)
#
# Used by the naive contension baseline, which deletes all clauses that
# mention an atom; definition variables from Tseitin would break that
# 'set the atom to the paradoxical value' reading.

Clause = frozenset  # of (atom, positive) literal pairs


def to_clauses_distributive(f: Formula) -> set[Clause] | None:
    """Logically equivalent clause set over the formula's own atoms.

    Returns ``None`` when the formula is unsatisfiable by constant folding
    alone (i.e. it reduces to the constant `-`).  Tautological clauses are
    dropped, so a valid formula yields the empty set.
    """
    folded = fold_constants(reduce_connectives(f))
    if isinstance(folded, Bottom):
        return None
    if isinstance(folded, Top):
        return set()

    def nnf(node: Formula, negate: bool) -> Formula:
        if isinstance(node, Atom):
            return Not(node) if negate else node
        if isinstance(node, Not):
            return nnf(node.child, not negate)
        assert isinstance(node, (And, Or))
        left = nnf(node.left, negate)
        right = nnf(node.right, negate)
        if negate:
            return Or(left, right) if isinstance(node, And) else And(left, right)
        return type(node)(left, right)

    def clauses_of(node: Formula) -> set[Clause]:
        if isinstance(node, Atom):
            return {frozenset([(node.name, True)])}
        if isinstance(node, Not):
            assert isinstance(node.child, Atom)
            return {frozenset([(node.child.name, False)])}
        if isinstance(node, And):
            return clauses_of(node.left) | clauses_of(node.right)
        assert isinstance(node, Or)
        out = set()
        for cl in clauses_of(node.left):
            for cr in clauses_of(node.right):
                merged = cl | cr
                if not any((name, not pos) in merged for name, pos in merged):
                    out.add(merged)
        return out

    return clauses_of(nnf(folded, False))
