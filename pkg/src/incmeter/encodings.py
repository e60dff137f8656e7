"""SAT encodings of the upper-bound decision problem for all six measures.

Each ``encode_*`` function builds a propositional instance that is
satisfiable exactly when the measure's value is at most the given bound
(for the hitting-set measure the bound is a block count, satisfiable iff
the value is at most ``blocks - 1``).

Construction follows a fixed shape: allocate the base signature, assert a
set of tagged rule formulas which are clausified by the Tseitin converter,
and attach cardinality constraints in clausal form.  The resulting
:class:`SatEncoding` records which clause range each rule produced and the
size of the base signature (auxiliary variables excluded), so structural
properties can be checked against the per-encoding size formulas.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from . import cardinality
from .cnf import (
    CnfInstance,
    TAG_ATOM,
    TAG_BLOCK,
    TAG_COPY,
    TAG_FORGET_BOT,
    TAG_FORGET_TOP,
    TAG_HIT,
    TAG_INV,
    TAG_OCC,
    TAG_OPT,
    TAG_TRI,
    TAG_VAL,
    VarMap,
    VarName,
    tseitin_append,
)
from .kb import (
    And,
    Atom,
    Formula,
    Iff,
    Implies,
    KnowledgeBase,
    Not,
    Or,
    Top,
    fold_constants,
    reduce_connectives,
    replace_at,
    substitute_atoms,
)

THREE_VALUES = ("t", "f", "b")

_LEAF_SEP = "\x00"


def prepare_kb(kb: KnowledgeBase) -> KnowledgeBase:
    """Reduce => / <=> and fold constants; the per-formula result is either
    constant-free or exactly + / -."""
    return KnowledgeBase(tuple(fold_constants(reduce_connectives(f)) for f in kb))


@dataclass
class SatEncoding:
    measure: str
    bound: int
    cnf: CnfInstance
    base_signature_size: int
    # (rule tag, first clause index, one past last clause index)
    rule_spans: list[tuple[str, int, int]] = field(default_factory=list)
    # time spent clausifying rule formulas, for runtime-composition reports
    cnf_transform_seconds: float = 0.0

    @property
    def varmap(self) -> VarMap:
        return self.cnf.varmap


@dataclass
class MaxSatContension:
    """Hard part SC3-SC16; soft units are the negated b-indicators."""

    hard: CnfInstance
    soft_units: list[int]
    base_signature_size: int
    cnf_transform_seconds: float = 0.0


class _Builder:
    """Accumulates tagged rules and compiles them into one clause set."""

    def __init__(self) -> None:
        self.vm = VarMap()
        self.clauses: list[list[int]] = []
        self.spans: list[tuple[str, int, int]] = []
        self._leaf_names: dict[str, VarName] = {}
        self._cnf_seconds = 0.0

    def leaf(self, name: VarName) -> Atom:
        """An AST leaf standing for the solver variable named `name`."""
        key = _LEAF_SEP.join(str(part) for part in name)
        self._leaf_names[key] = name
        return Atom(key)

    def _leaf_var(self, key: str) -> int:
        return self.vm.var(self._leaf_names[key])

    def assert_formula(self, tag: str, formula: Formula) -> None:
        start = len(self.clauses)
        begin = time.perf_counter()
        tseitin_append(formula, self.vm, self.clauses, self._leaf_var)
        self._cnf_seconds += time.perf_counter() - begin
        self._record(tag, start)

    def add_clauses(self, tag: str, clauses: list[list[int]]) -> None:
        start = len(self.clauses)
        self.clauses.extend(clauses)
        self._record(tag, start)

    def at_most(self, tag: str, k: int, variables: list[int], method: str) -> None:
        self.add_clauses(tag, cardinality.at_most(k, variables, self.vm, method))

    def _record(self, tag: str, start: int) -> None:
        if self.spans and self.spans[-1][0] == tag and self.spans[-1][2] == start:
            self.spans[-1] = (tag, self.spans[-1][1], len(self.clauses))
        elif len(self.clauses) > start:
            self.spans.append((tag, start, len(self.clauses)))

    def finish(self, measure: str, bound: int, base_size: int) -> SatEncoding:
        assert self.vm.base_count() == base_size, "base signature drifted"
        cnf = CnfInstance(len(self.vm), self.clauses, self.vm)
        return SatEncoding(measure, bound, cnf, base_size, self.spans, self._cnf_seconds)


# ---------------------------------------------------------------------------
# Contension (three-valued models with few b-assignments)


def _site_key(site) -> tuple:
    return (site.formula_index, site.path)


def encode_contension(
    kb: KnowledgeBase, u: int, card_method: str = "sequential"
) -> SatEncoding:
    pkb = prepare_kb(kb)
    atoms = pkb.signature()
    sites = pkb.subformula_sites()
    b = _Builder()
    for x in atoms:  # SC1
        for v in THREE_VALUES:
            b.vm.var((TAG_TRI, x, v))
    for site, _ in sites:  # SC2
        for v in THREE_VALUES:
            b.vm.var((TAG_VAL, _site_key(site), v))
    base_size = 3 * len(atoms) + 3 * len(sites)

    def tri(x: str, v: str) -> Atom:
        return b.leaf((TAG_TRI, x, v))

    def val(site, v: str) -> Atom:
        return b.leaf((TAG_VAL, _site_key(site), v))

    for x in atoms:  # SC3: exactly one of X_t, X_f, X_b
        b.assert_formula(
            "SC3",
            And(
                Or(tri(x, "t"), Or(tri(x, "f"), tri(x, "b"))),
                And(
                    Or(Not(tri(x, "t")), Not(tri(x, "f"))),
                    And(
                        Or(Not(tri(x, "t")), Not(tri(x, "b"))),
                        Or(Not(tri(x, "b")), Not(tri(x, "f"))),
                    ),
                ),
            ),
        )
    for site, node in sites:
        if isinstance(node, And):  # SC4-SC6
            l, r = site.child(0), site.child(1)
            b.assert_formula("SC4", Iff(val(site, "t"), And(val(l, "t"), val(r, "t"))))
            b.assert_formula("SC5", Iff(val(site, "f"), Or(val(l, "f"), val(r, "f"))))
            b.assert_formula(
                "SC6",
                Iff(
                    val(site, "b"),
                    And(
                        Or(Not(val(l, "t")), Not(val(r, "t"))),
                        And(Not(val(l, "f")), Not(val(r, "f"))),
                    ),
                ),
            )
        elif isinstance(node, Or):  # SC7-SC9
            l, r = site.child(0), site.child(1)
            b.assert_formula("SC7", Iff(val(site, "t"), Or(val(l, "t"), val(r, "t"))))
            b.assert_formula("SC8", Iff(val(site, "f"), And(val(l, "f"), val(r, "f"))))
            b.assert_formula(
                "SC9",
                Iff(
                    val(site, "b"),
                    And(
                        Or(Not(val(l, "f")), Not(val(r, "f"))),
                        And(Not(val(l, "t")), Not(val(r, "t"))),
                    ),
                ),
            )
        elif isinstance(node, Not):  # SC10-SC12
            c = site.child(0)
            b.assert_formula("SC10", Iff(val(site, "t"), val(c, "f")))
            b.assert_formula("SC11", Iff(val(site, "f"), val(c, "t")))
            b.assert_formula("SC12", Iff(val(site, "b"), val(c, "b")))
        elif isinstance(node, Atom):  # SC13-SC15
            b.assert_formula("SC13", Iff(val(site, "t"), tri(node.name, "t")))
            b.assert_formula("SC14", Iff(val(site, "f"), tri(node.name, "f")))
            b.assert_formula("SC15", Iff(val(site, "b"), tri(node.name, "b")))
        else:
            # Whole-formula constant left by folding; fix its valuation.
            target = "t" if isinstance(node, Top) else "f"
            for v in THREE_VALUES:
                sign = (lambda a: a) if v == target else Not
                b.assert_formula("SC-const", sign(val(site, v)))
    for idx in range(len(pkb)):  # SC16: every KB member is t or b
        root = next(site for site, _ in sites if site.formula_index == idx and not site.path)
        b.assert_formula("SC16", Or(val(root, "t"), val(root, "b")))
    b_vars = [b.vm.id_of((TAG_TRI, x, "b")) for x in atoms]
    b.at_most("SC17", u, b_vars, card_method)
    return b.finish("contension", u, base_size)


def encode_contension_maxsat(
    kb: KnowledgeBase, card_method: str = "sequential"
) -> MaxSatContension:
    """Hard clauses SC3-SC16 with one weight-1 soft unit !X_b per atom."""
    pkb = prepare_kb(kb)
    atoms = pkb.signature()
    enc = encode_contension(kb, len(atoms), card_method)
    # Rebuild without the cardinality constraint: everything but SC17.
    keep_end = min(
        (start for tag, start, _ in enc.rule_spans if tag == "SC17"),
        default=len(enc.cnf.clauses),
    )
    hard = CnfInstance(enc.cnf.num_vars, enc.cnf.clauses[:keep_end], enc.cnf.varmap)
    soft = [-enc.cnf.varmap.id_of((TAG_TRI, x, "b")) for x in atoms]
    return MaxSatContension(
        hard, soft, enc.base_signature_size, enc.cnf_transform_seconds
    )


# ---------------------------------------------------------------------------
# Forgetting (occurrence substitution switches)


def encode_forgetting(
    kb: KnowledgeBase, u: int, card_method: str = "sequential"
) -> SatEncoding:
    pkb = prepare_kb(kb)
    occurrences = pkb.occurrences()
    b = _Builder()
    for occ in occurrences:  # SF1-SF2
        b.vm.var((TAG_OCC, occ.atom, occ.label))
        b.vm.var((TAG_FORGET_TOP, occ.atom, occ.label))
        b.vm.var((TAG_FORGET_BOT, occ.atom, occ.label))
    base_size = 3 * len(occurrences)

    # SF3: replace each occurrence X^l by (t_{X,l} | X^l) & !f_{X,l}.
    by_formula: dict[int, list] = {}
    for occ in occurrences:
        by_formula.setdefault(occ.site.formula_index, []).append(occ)
    for idx, formula in enumerate(pkb):
        substituted = formula
        for occ in by_formula.get(idx, ()):
            switch = And(
                Or(
                    b.leaf((TAG_FORGET_TOP, occ.atom, occ.label)),
                    b.leaf((TAG_OCC, occ.atom, occ.label)),
                ),
                Not(b.leaf((TAG_FORGET_BOT, occ.atom, occ.label))),
            )
            substituted = replace_at(substituted, occ.site.path, switch)
        b.assert_formula("SF3", substituted)
    # Occurrences of one atom that are not forgotten share its truth value.
    by_atom: dict[str, list] = {}
    for occ in occurrences:
        by_atom.setdefault(occ.atom, []).append(occ)
    for atom, occs in sorted(by_atom.items()):
        first = occs[0]
        for occ in occs[1:]:
            b.assert_formula(
                "SF-link",
                Iff(
                    b.leaf((TAG_OCC, atom, first.label)),
                    b.leaf((TAG_OCC, atom, occ.label)),
                ),
            )
    for occ in occurrences:  # SF4
        b.assert_formula(
            "SF4",
            Or(
                Not(b.leaf((TAG_FORGET_TOP, occ.atom, occ.label))),
                Not(b.leaf((TAG_FORGET_BOT, occ.atom, occ.label))),
            ),
        )
    forget_vars = [
        b.vm.id_of((tag, occ.atom, occ.label))
        for occ in occurrences
        for tag in (TAG_FORGET_TOP, TAG_FORGET_BOT)
    ]
    b.at_most("SF5", u, forget_vars, card_method)
    return b.finish("forgetting", u, base_size)


# ---------------------------------------------------------------------------
# Hitting set (partition into satisfiable blocks)


def encode_hs(
    kb: KnowledgeBase, blocks: int, card_method: str = "sequential"
) -> SatEncoding:
    """Satisfiable iff the KB partitions into `blocks` satisfiable blocks,
    i.e. iff the hitting-set value is at most blocks - 1."""
    if len(kb) == 0:
        raise ValueError("hitting-set encoding requires a non-empty KB")
    if not 1 <= blocks <= len(kb):
        raise ValueError(f"block count {blocks} outside 1..{len(kb)}")
    pkb = prepare_kb(kb)
    atoms = pkb.signature()
    b = _Builder()
    for x in atoms:  # SH1
        for i in range(1, blocks + 1):
            b.vm.var((TAG_COPY, x, i))
    for idx in range(len(pkb)):  # SH2
        for i in range(1, blocks + 1):
            b.vm.var((TAG_BLOCK, idx, i))
    base_size = blocks * (len(atoms) + len(pkb))
    for idx, formula in enumerate(pkb):
        for i in range(1, blocks + 1):
            copy = substitute_atoms(formula, lambda x, i=i: b.leaf((TAG_COPY, x, i)))
            b.assert_formula(
                "SH3", Implies(b.leaf((TAG_BLOCK, idx, i)), copy)
            )
    for idx in range(len(pkb)):  # SH4
        clause: Formula = b.leaf((TAG_BLOCK, idx, 1))
        for i in range(2, blocks + 1):
            clause = Or(clause, b.leaf((TAG_BLOCK, idx, i)))
        b.assert_formula("SH4", clause)
    return b.finish("hitting-set", blocks, base_size)


# ---------------------------------------------------------------------------
# Max- and sum-distance (chosen world plus per-formula witness worlds)


def _encode_distance_common(
    kb: KnowledgeBase, u: int, per_formula_bound: bool, card_method: str
) -> SatEncoding:
    tags = "SDM" if per_formula_bound else "SDS"
    pkb = prepare_kb(kb)
    atoms = pkb.signature()
    n = len(pkb)
    b = _Builder()
    for x in atoms:  # SDM1/SDS1
        b.vm.var((TAG_OPT, x))
    for x in atoms:  # SDM2-SDM3 / SDS2-SDS3
        for i in range(1, n + 1):
            b.vm.var((TAG_COPY, x, i))
            b.vm.var((TAG_INV, x, i))
    base_size = len(atoms) + 2 * n * len(atoms)
    for idx, formula in enumerate(pkb):  # SDM4/SDS4: assert the i-th copy
        i = idx + 1
        copy = substitute_atoms(formula, lambda x, i=i: b.leaf((TAG_COPY, x, i)))
        b.assert_formula(f"{tags}4", copy)
    for x in atoms:  # SDM5-SDM6 / SDS5-SDS6
        for i in range(1, n + 1):
            xi = b.leaf((TAG_COPY, x, i))
            xo = b.leaf((TAG_OPT, x))
            inv = b.leaf((TAG_INV, x, i))
            b.assert_formula(f"{tags}5", Implies(xi, Or(xo, inv)))
            b.assert_formula(f"{tags}6", Implies(Not(xi), Or(Not(xo), inv)))
    if per_formula_bound:  # SDM7: one bound per formula index
        for i in range(1, n + 1):
            inv_vars = [b.vm.id_of((TAG_INV, x, i)) for x in atoms]
            b.at_most("SDM7", u, inv_vars, card_method)
        return b.finish("max-distance", u, base_size)
    inv_vars = [  # SDS7: one global bound
        b.vm.id_of((TAG_INV, x, i)) for x in atoms for i in range(1, n + 1)
    ]
    b.at_most("SDS7", u, inv_vars, card_method)
    return b.finish("sum-distance", u, base_size)


def encode_dmax(kb: KnowledgeBase, u: int, card_method: str = "sequential") -> SatEncoding:
    return _encode_distance_common(kb, u, True, card_method)


def encode_dsum(kb: KnowledgeBase, u: int, card_method: str = "sequential") -> SatEncoding:
    return _encode_distance_common(kb, u, False, card_method)


# ---------------------------------------------------------------------------
# Hit-distance (drop few formulas)


def encode_dhit(kb: KnowledgeBase, u: int, card_method: str = "sequential") -> SatEncoding:
    pkb = prepare_kb(kb)
    atoms = pkb.signature()
    b = _Builder()
    for idx in range(len(pkb)):  # SDH1
        b.vm.var((TAG_HIT, idx))
    for x in atoms:  # SDH2
        b.vm.var((TAG_ATOM, x))
    base_size = len(atoms) + len(pkb)
    for idx, formula in enumerate(pkb):  # SDH3
        body = substitute_atoms(formula, lambda x: b.leaf((TAG_ATOM, x)))
        b.assert_formula("SDH3", Or(body, b.leaf((TAG_HIT, idx))))
    hit_vars = [b.vm.id_of((TAG_HIT, idx)) for idx in range(len(pkb))]
    b.at_most("SDH4", u, hit_vars, card_method)
    return b.finish("hit-distance", u, base_size)


# ---------------------------------------------------------------------------
# Dispatch helpers


def expected_base_size(measure: str, kb: KnowledgeBase, bound: int | None = None) -> int:
    """The per-encoding signature-size formula, on the prepared KB."""
    pkb = prepare_kb(kb)
    n_atoms = len(pkb.signature())
    if measure == "contension":
        return 3 * n_atoms + 3 * len(pkb.subformula_sites())
    if measure == "forgetting":
        return 3 * len(pkb.occurrences())
    if measure == "hitting-set":
        assert bound is not None
        return bound * (n_atoms + len(pkb))
    if measure in ("max-distance", "sum-distance"):
        return n_atoms + 2 * len(pkb) * n_atoms
    if measure == "hit-distance":
        return n_atoms + len(pkb)
    raise ValueError(f"unknown measure {measure!r}")


def encode(measure: str, kb: KnowledgeBase, bound: int, card_method: str = "sequential") -> SatEncoding:
    """Build the upper-bound encoding; for hitting-set, `bound` is the value
    and the instance uses `bound + 1` blocks."""
    if measure == "contension":
        return encode_contension(kb, bound, card_method)
    if measure == "forgetting":
        return encode_forgetting(kb, bound, card_method)
    if measure == "hitting-set":
        return encode_hs(kb, bound + 1, card_method)
    if measure == "max-distance":
        return encode_dmax(kb, bound, card_method)
    if measure == "sum-distance":
        return encode_dsum(kb, bound, card_method)
    if measure == "hit-distance":
        return encode_dhit(kb, bound, card_method)
    raise ValueError(f"unknown measure {measure!r}")
