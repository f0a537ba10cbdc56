"""Core data model: sorts, terms, constraint formulas, atoms, clauses.

Everything here is immutable and hashable; clause sets can be shared freely
across threads. Pretty-printing produces the same surface syntax the parser
accepts, with per-clause display names (A, B, ..., Z, A1, ...) so derived
clauses read like hand-written ones.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator


# ---------------------------------------------------------------------------
# Sorts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Sort:
    name: str

    @property
    def is_basic(self) -> bool:
        return self.name in ("int", "bool")

    @property
    def is_adt(self) -> bool:
        return not self.is_basic

    def __str__(self) -> str:
        return self.name


INT = Sort("int")
BOOL = Sort("bool")


@dataclass(frozen=True)
class CtorDecl:
    name: str
    arg_sorts: tuple[Sort, ...]


@dataclass(frozen=True)
class SortDef:
    """An algebraic data type: a sort plus its constructor signatures."""

    sort: Sort
    ctors: tuple[CtorDecl, ...]

    def ctor(self, name: str) -> CtorDecl:
        for c in self.ctors:
            if c.name == name:
                return c
        raise KeyError(f"no constructor {name} in sort {self.sort}")


def list_sort(elem: Sort) -> Sort:
    return Sort(f"list({elem})")


def tree_sort(elem: Sort) -> Sort:
    return Sort(f"tree({elem})")


def list_def(elem: Sort) -> SortDef:
    s = list_sort(elem)
    return SortDef(s, (CtorDecl("[]", ()), CtorDecl("cons", (elem, s))))


def tree_def(elem: Sort) -> SortDef:
    s = tree_sort(elem)
    return SortDef(s, (CtorDecl("leaf", ()), CtorDecl("node", (s, elem, s))))


class SortTable:
    """Declared ADTs by sort name; list(...) and tree(...) are predeclared lazily."""

    def __init__(self) -> None:
        self._defs: dict[str, SortDef] = {}

    def add(self, sd: SortDef) -> None:
        if sd.sort.name in self._defs:
            raise ValueError(f"sort {sd.sort} already declared")
        self._defs[sd.sort.name] = sd

    def resolve(self, sort: Sort) -> SortDef:
        sd = self._defs.get(sort.name)
        if sd is None:
            if sort.name.startswith("list(") and sort.name.endswith(")"):
                inner = Sort(sort.name[5:-1])
                sd = list_def(inner)
            elif sort.name.startswith("tree(") and sort.name.endswith(")"):
                inner = Sort(sort.name[5:-1])
                sd = tree_def(inner)
            else:
                raise KeyError(f"unknown sort {sort}")
            self._defs[sort.name] = sd
        return sd

    def known(self, sort: Sort) -> bool:
        try:
            self.resolve(sort)
            return True
        except KeyError:
            return False

    def adt_defs(self) -> list[SortDef]:
        return [self._defs[k] for k in sorted(self._defs)]


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------

class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str
    sort: Sort

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class IntConst(Term):
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class BoolConst(Term):
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


@dataclass(frozen=True)
class LinExpr(Term):
    """a0 + a1*X1 + ... + an*Xn with integer coefficients, kept in canonical form."""

    coeffs: tuple[tuple[Var, int], ...]
    const: int

    def __str__(self) -> str:
        parts: list[str] = []
        for v, a in self.coeffs:
            if a == 1:
                parts.append(str(v))
            elif a == -1:
                parts.append(f"-{v}")
            else:
                parts.append(f"{a}*{v}")
        if self.const != 0 or not parts:
            parts.append(str(self.const))
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith("-") else "+" + p
        return out


@dataclass(frozen=True)
class Ctor(Term):
    sort: Sort
    ctor: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return str(pretty_term(self))


@dataclass(frozen=True)
class TermIte(Term):
    cond: "Formula"
    then: Term
    els: Term

    def __str__(self) -> str:
        return f"ite({self.cond},{self.then},{self.els})"


def lin(coeffs: dict[Var, int] | Iterable[tuple[Var, int]], const: int = 0) -> Term:
    """Canonical linear term: collapses to Var/IntConst when possible."""
    acc: dict[Var, int] = {}
    items = coeffs.items() if isinstance(coeffs, dict) else coeffs
    for v, a in items:
        acc[v] = acc.get(v, 0) + a
        if acc[v] == 0:
            del acc[v]
    if not acc:
        return IntConst(const)
    if len(acc) == 1 and const == 0:
        (v, a), = acc.items()
        if a == 1:
            return v
    return LinExpr(tuple(sorted(acc.items(), key=lambda p: p[0].name)), const)


def as_lin(t: Term) -> tuple[dict[Var, int], int]:
    """View an Int term as (coeffs, const); raises on non-linear terms."""
    if isinstance(t, Var):
        return {t: 1}, 0
    if isinstance(t, IntConst):
        return {}, t.value
    if isinstance(t, LinExpr):
        return dict(t.coeffs), t.const
    raise TypeError(f"not a linear term: {t!r}")


def lin_sub(a: Term, b: Term) -> Term:
    ca, ka = as_lin(a)
    cb, kb = as_lin(b)
    for v, x in cb.items():
        ca[v] = ca.get(v, 0) + (-x)
    return lin(ca, ka - kb)


def term_sort(t: Term) -> Sort:
    if isinstance(t, Var):
        return t.sort
    if isinstance(t, IntConst) or isinstance(t, LinExpr):
        return INT
    if isinstance(t, BoolConst):
        return BOOL
    if isinstance(t, Ctor):
        return t.sort
    if isinstance(t, TermIte):
        return term_sort(t.then)
    raise TypeError(f"unknown term {t!r}")


# ---------------------------------------------------------------------------
# Constraint formulas (quantifier-free LIA + Bool, with ite)
# ---------------------------------------------------------------------------

class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class FTrue(Formula):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FFalse(Formula):
    def __str__(self) -> str:
        return "false"


TRUE = FTrue()
FALSE = FFalse()


@dataclass(frozen=True)
class FVar(Formula):
    var: Var

    def __str__(self) -> str:
        return self.var.name


@dataclass(frozen=True)
class FNot(Formula):
    arg: Formula

    def __str__(self) -> str:
        return f"~{_paren(self.arg)}"


@dataclass(frozen=True)
class FAnd(Formula):
    args: tuple[Formula, ...]

    def __str__(self) -> str:
        return " & ".join(_paren(a) for a in self.args)


@dataclass(frozen=True)
class FOr(Formula):
    args: tuple[Formula, ...]

    def __str__(self) -> str:
        return " \\/ ".join(_paren(a) for a in self.args)


@dataclass(frozen=True)
class FImp(Formula):
    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return f"{_paren(self.lhs)} => {_paren(self.rhs)}"


@dataclass(frozen=True)
class FIff(Formula):
    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return f"{_paren(self.lhs)} <=> {_paren(self.rhs)}"


@dataclass(frozen=True)
class FIte(Formula):
    cond: Formula
    then: Formula
    els: Formula

    def __str__(self) -> str:
        return f"ite({self.cond},{self.then},{self.els})"


@dataclass(frozen=True)
class FComp(Formula):
    """LIA atom over Int terms; rel is one of = < =< >= >."""

    rel: str
    lhs: Term
    rhs: Term

    def __str__(self) -> str:
        return f"{self.lhs}{self.rel}{self.rhs}"


@dataclass(frozen=True)
class FEq(Formula):
    """Equality between same-sorted ADT terms."""

    lhs: Term
    rhs: Term
    sort: Sort

    def __str__(self) -> str:
        return f"{pretty_term(self.lhs)}={pretty_term(self.rhs)}"


_ATOMIC = (FTrue, FFalse, FVar, FComp, FEq)


def _paren(f: Formula) -> str:
    if isinstance(f, _ATOMIC) or isinstance(f, (FNot, FIte)):
        return str(f)
    return f"({f})"


def mk_and(*fs: Formula) -> Formula:
    flat: list[Formula] = []
    seen: set[Formula] = set()
    for f in fs:
        args = f.args if isinstance(f, FAnd) else (f,)
        for a in args:
            if isinstance(a, FFalse):
                return FALSE
            if not isinstance(a, FTrue) and a not in seen:
                seen.add(a)
                flat.append(a)
    if not flat:
        return TRUE
    if len(flat) == 1:
        return flat[0]
    return FAnd(tuple(flat))


def mk_or(*fs: Formula) -> Formula:
    flat: list[Formula] = []
    for f in fs:
        if isinstance(f, FOr):
            flat.extend(f.args)
        elif isinstance(f, FTrue):
            return TRUE
        elif not isinstance(f, FFalse):
            flat.append(f)
    if not flat:
        return FALSE
    if len(flat) == 1:
        return flat[0]
    return FOr(tuple(flat))


def mk_not(f: Formula) -> Formula:
    if isinstance(f, FTrue):
        return FALSE
    if isinstance(f, FFalse):
        return TRUE
    if isinstance(f, FNot):
        return f.arg
    return FNot(f)


def conjuncts(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, FAnd):
        return f.args
    if isinstance(f, FTrue):
        return ()
    return (f,)


def eq_of(lhs: Term, rhs: Term, sort: Sort) -> Formula:
    """Sort-directed equality: LIA atom on int, iff on bool, FEq on ADTs."""
    if sort == INT:
        return FComp("=", lhs, rhs)
    if sort == BOOL:
        return FIff(_as_formula(lhs), _as_formula(rhs))
    return FEq(lhs, rhs, sort)


def _as_formula(t: Term) -> Formula:
    if isinstance(t, Var):
        return FVar(t)
    if isinstance(t, BoolConst):
        return TRUE if t.value else FALSE
    if isinstance(t, TermIte):
        return FIte(t.cond, _as_formula(t.then), _as_formula(t.els))
    raise TypeError(f"not a boolean term: {t!r}")


# ---------------------------------------------------------------------------
# Atoms, clauses, problems
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Atom:
    pred: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        if not self.args:
            return self.pred
        return f"{self.pred}({','.join(pretty_term(a) for a in self.args)})"


@dataclass(frozen=True)
class Clause:
    """H <- c, B.  head is None for a query (head false)."""

    head: Atom | None
    constraint: Formula
    body: tuple[Atom, ...]
    origin: str = "source"

    @property
    def is_query(self) -> bool:
        return self.head is None

    def __str__(self) -> str:
        return pretty_clause(self)


PRED_PROGRAM = "program"
PRED_CATA = "catamorphism"
PRED_TRUE = "builtin-true"


@dataclass(frozen=True)
class PredDecl:
    name: str
    arg_sorts: tuple[Sort, ...]
    kind: str = PRED_PROGRAM
    # Catamorphism argument partition: indices of input-basic, input-ADT, output args.
    in_idx: tuple[int, ...] = ()
    adt_idx: int = -1
    out_idx: tuple[int, ...] = ()


@dataclass
class Problem:
    sorts: SortTable
    preds: dict[str, PredDecl]
    program: list[Clause]
    properties: list[Clause]
    queries: list[Clause]

    def decl(self, name: str) -> PredDecl:
        return self.preds[name]

    def kind(self, name: str) -> str:
        return self.preds[name].kind

    def definite_clauses(self) -> list[Clause]:
        return self.program + self.properties

    def all_clauses(self) -> list[Clause]:
        return self.program + self.properties + self.queries


# ---------------------------------------------------------------------------
# Variables: collection, renaming, substitution
# ---------------------------------------------------------------------------

def term_vars(t: Term, out: set[Var]) -> None:
    if isinstance(t, Var):
        out.add(t)
    elif isinstance(t, LinExpr):
        for v, _ in t.coeffs:
            out.add(v)
    elif isinstance(t, Ctor):
        for a in t.args:
            term_vars(a, out)
    elif isinstance(t, TermIte):
        formula_vars(t.cond, out)
        term_vars(t.then, out)
        term_vars(t.els, out)


def formula_vars(f: Formula, out: set[Var]) -> None:
    if isinstance(f, FVar):
        out.add(f.var)
    elif isinstance(f, FNot):
        formula_vars(f.arg, out)
    elif isinstance(f, (FAnd, FOr)):
        for a in f.args:
            formula_vars(a, out)
    elif isinstance(f, (FImp, FIff)):
        formula_vars(f.lhs, out)
        formula_vars(f.rhs, out)
    elif isinstance(f, FIte):
        formula_vars(f.cond, out)
        formula_vars(f.then, out)
        formula_vars(f.els, out)
    elif isinstance(f, FComp):
        term_vars(f.lhs, out)
        term_vars(f.rhs, out)
    elif isinstance(f, FEq):
        term_vars(f.lhs, out)
        term_vars(f.rhs, out)


def free_vars(x, kind: str = "all") -> set[Var]:
    """Variables of a term/formula/atom/clause; kind selects all|basic|adt."""
    out: set[Var] = set()
    if isinstance(x, Term):
        term_vars(x, out)
    elif isinstance(x, Formula):
        formula_vars(x, out)
    elif isinstance(x, Atom):
        for a in x.args:
            term_vars(a, out)
    elif isinstance(x, Clause):
        if x.head is not None:
            for a in x.head.args:
                term_vars(a, out)
        formula_vars(x.constraint, out)
        for at in x.body:
            for a in at.args:
                term_vars(a, out)
    elif isinstance(x, (list, tuple, set, frozenset)):
        for item in x:
            out |= free_vars(item)
    else:
        raise TypeError(f"free_vars: unsupported {type(x)}")
    if kind == "basic":
        return {v for v in out if v.sort.is_basic}
    if kind == "adt":
        return {v for v in out if v.sort.is_adt}
    return out


class Subst:
    """Sort-preserving map from variables to terms."""

    def __init__(self, mapping: dict[Var, Term] | None = None) -> None:
        self.mapping: dict[Var, Term] = dict(mapping or {})

    def __bool__(self) -> bool:
        return bool(self.mapping)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subst) and self.mapping == other.mapping

    def __repr__(self) -> str:
        inner = ", ".join(f"{v}->{pretty_term(t)}" for v, t in sorted(
            self.mapping.items(), key=lambda p: p[0].name))
        return "{" + inner + "}"

    def term(self, t: Term) -> Term:
        if isinstance(t, Var):
            return self.mapping.get(t, t)
        if isinstance(t, (IntConst, BoolConst)):
            return t
        if isinstance(t, LinExpr):
            acc: dict[Var, int] = {}
            k = t.const
            for v, a in t.coeffs:
                img = self.mapping.get(v, v)
                ci, ki = as_lin(img)
                for w, x in ci.items():
                    acc[w] = acc.get(w, 0) + a * x
                k += a * ki
            return lin(acc, k)
        if isinstance(t, Ctor):
            return Ctor(t.sort, t.ctor, tuple(self.term(a) for a in t.args))
        if isinstance(t, TermIte):
            return TermIte(self.formula(t.cond), self.term(t.then), self.term(t.els))
        raise TypeError(f"unknown term {t!r}")

    def formula(self, f: Formula) -> Formula:
        if isinstance(f, (FTrue, FFalse)):
            return f
        if isinstance(f, FVar):
            img = self.mapping.get(f.var)
            if img is None:
                return f
            return _as_formula(img)
        if isinstance(f, FNot):
            return mk_not(self.formula(f.arg))
        if isinstance(f, FAnd):
            return mk_and(*(self.formula(a) for a in f.args))
        if isinstance(f, FOr):
            return mk_or(*(self.formula(a) for a in f.args))
        if isinstance(f, FImp):
            return FImp(self.formula(f.lhs), self.formula(f.rhs))
        if isinstance(f, FIff):
            return FIff(self.formula(f.lhs), self.formula(f.rhs))
        if isinstance(f, FIte):
            return FIte(self.formula(f.cond), self.formula(f.then), self.formula(f.els))
        if isinstance(f, FComp):
            return FComp(f.rel, self.term(f.lhs), self.term(f.rhs))
        if isinstance(f, FEq):
            return FEq(self.term(f.lhs), self.term(f.rhs), f.sort)
        raise TypeError(f"unknown formula {f!r}")

    def atom(self, a: Atom) -> Atom:
        return Atom(a.pred, tuple(self.term(t) for t in a.args))

    def clause(self, c: Clause) -> Clause:
        head = None if c.head is None else self.atom(c.head)
        return Clause(head, self.formula(c.constraint),
                      tuple(self.atom(a) for a in c.body), c.origin)

    def compose(self, other: "Subst") -> "Subst":
        """self then other: x -> other(self(x))."""
        out: dict[Var, Term] = {}
        for v, t in self.mapping.items():
            img = other.term(t)
            if img != v:
                out[v] = img
        for v, t in other.mapping.items():
            if v not in self.mapping:
                out[v] = t
        return Subst(out)


# ---------------------------------------------------------------------------
# Unification
# ---------------------------------------------------------------------------

def occurs(v: Var, t: Term) -> bool:
    return v in free_vars(t)


def _unify(lhs: Term, rhs: Term, s: Subst) -> Subst | None:
    lhs = s.term(lhs)
    rhs = s.term(rhs)
    if lhs == rhs:
        return s
    if isinstance(lhs, Var):
        if occurs(lhs, rhs):
            return None
        return s.compose(Subst({lhs: rhs}))
    if isinstance(rhs, Var):
        if occurs(rhs, lhs):
            return None
        return s.compose(Subst({rhs: lhs}))
    if isinstance(lhs, Ctor) and isinstance(rhs, Ctor):
        if lhs.sort != rhs.sort or lhs.ctor != rhs.ctor or len(lhs.args) != len(rhs.args):
            return None
        for a, b in zip(lhs.args, rhs.args):
            s2 = _unify(a, b, s)
            if s2 is None:
                return None
            s = s2
        return s
    # LIA / ite / constant subterms unify only syntactically; semantic equality
    # is the constraint engine's job.
    return None


def unify_terms(lhs: Term, rhs: Term) -> Subst | None:
    return _unify(lhs, rhs, Subst())


def mgu(a1: Atom, a2: Atom) -> Subst | None:
    """Most general unifier of two atoms over constructor terms and variables."""
    if a1.pred != a2.pred or len(a1.args) != len(a2.args):
        return None
    s = Subst()
    for x, y in zip(a1.args, a2.args):
        s2 = _unify(x, y, s)
        if s2 is None:
            return None
        s = s2
    return s


# ---------------------------------------------------------------------------
# Fresh names and renaming
# ---------------------------------------------------------------------------

class NameGen:
    """Deterministic fresh-name source; '#' keeps names out of the surface lexicon."""

    def __init__(self, prefix: str = "V") -> None:
        self.prefix = prefix
        self.n = 0

    def fresh(self, base: str = "") -> str:
        self.n += 1
        stem = base.split("#")[0] if base else self.prefix
        return f"{stem}#{self.n}"

    def fresh_var(self, sort: Sort, base: str = "") -> Var:
        return Var(self.fresh(base), sort)


def rename_apart(c: Clause, avoid: set[Var], gen: NameGen) -> tuple[Clause, Subst]:
    """A variant of c whose variables are disjoint from avoid (bijective renaming)."""
    ren: dict[Var, Term] = {}
    taken = {v.name for v in avoid}
    for v in sorted(free_vars(c), key=lambda w: w.name):
        if v.name in taken:
            nv = gen.fresh_var(v.sort, v.name)
            while nv.name in taken:
                nv = gen.fresh_var(v.sort, v.name)
            ren[v] = nv
            taken.add(nv.name)
    s = Subst(ren)
    return s.clause(c), s


def rename_all_fresh(c: Clause, gen: NameGen) -> tuple[Clause, Subst]:
    """Variant of c with every variable fresh."""
    ren = {v: gen.fresh_var(v.sort, v.name)
           for v in sorted(free_vars(c), key=lambda w: w.name)}
    s = Subst(ren)
    return s.clause(c), s


# ---------------------------------------------------------------------------
# Variant matching (clause isomorphism modulo variable renaming)
# ---------------------------------------------------------------------------

def _match_term(pat: Term, t: Term, bij: dict[Var, Var], rev: dict[Var, Var]) -> bool:
    if isinstance(pat, Var):
        if not isinstance(t, Var) or pat.sort != t.sort:
            return False
        if pat in bij:
            return bij[pat] == t
        if t in rev:
            return False
        bij[pat] = t
        rev[t] = pat
        return True
    if isinstance(pat, (IntConst, BoolConst)):
        return pat == t
    if isinstance(pat, LinExpr):
        if not isinstance(t, LinExpr) or pat.const != t.const:
            return False
        if len(pat.coeffs) != len(t.coeffs):
            return False
        # Coefficient multisets must correspond under the bijection; try in order
        # of the pattern, matching each var to an unused counterpart.
        used: set[int] = set()
        for v, a in pat.coeffs:
            ok = False
            for i, (w, b) in enumerate(t.coeffs):
                if i in used or a != b:
                    continue
                save_b, save_r = dict(bij), dict(rev)
                if _match_term(v, w, bij, rev):
                    used.add(i)
                    ok = True
                    break
                bij.clear(); bij.update(save_b)
                rev.clear(); rev.update(save_r)
            if not ok:
                return False
        return True
    if isinstance(pat, Ctor):
        if not isinstance(t, Ctor) or pat.sort != t.sort or pat.ctor != t.ctor:
            return False
        return all(_match_term(a, b, bij, rev) for a, b in zip(pat.args, t.args))
    if isinstance(pat, TermIte):
        return (isinstance(t, TermIte)
                and _match_formula(pat.cond, t.cond, bij, rev)
                and _match_term(pat.then, t.then, bij, rev)
                and _match_term(pat.els, t.els, bij, rev))
    return False


def _match_formula(pat: Formula, f: Formula, bij: dict[Var, Var], rev: dict[Var, Var]) -> bool:
    if type(pat) is not type(f):
        return False
    if isinstance(pat, (FTrue, FFalse)):
        return True
    if isinstance(pat, FVar):
        return _match_term(pat.var, f.var, bij, rev)
    if isinstance(pat, FNot):
        return _match_formula(pat.arg, f.arg, bij, rev)
    if isinstance(pat, (FAnd, FOr)):
        if len(pat.args) != len(f.args):
            return False
        return all(_match_formula(a, b, bij, rev) for a, b in zip(pat.args, f.args))
    if isinstance(pat, (FImp, FIff)):
        return (_match_formula(pat.lhs, f.lhs, bij, rev)
                and _match_formula(pat.rhs, f.rhs, bij, rev))
    if isinstance(pat, FIte):
        return (_match_formula(pat.cond, f.cond, bij, rev)
                and _match_formula(pat.then, f.then, bij, rev)
                and _match_formula(pat.els, f.els, bij, rev))
    if isinstance(pat, FComp):
        return (pat.rel == f.rel and _match_term(pat.lhs, f.lhs, bij, rev)
                and _match_term(pat.rhs, f.rhs, bij, rev))
    if isinstance(pat, FEq):
        return (pat.sort == f.sort and _match_term(pat.lhs, f.lhs, bij, rev)
                and _match_term(pat.rhs, f.rhs, bij, rev))
    return False


def _match_atoms_multiset(pats: tuple[Atom, ...], ats: tuple[Atom, ...],
                          bij: dict[Var, Var], rev: dict[Var, Var]) -> bool:
    if not pats:
        return not ats
    pat = pats[0]
    for i, a in enumerate(ats):
        if a.pred != pat.pred or len(a.args) != len(pat.args):
            continue
        save_b, save_r = dict(bij), dict(rev)
        if all(_match_term(p, t, bij, rev) for p, t in zip(pat.args, a.args)):
            if _match_atoms_multiset(pats[1:], ats[:i] + ats[i + 1:], bij, rev):
                return True
        bij.clear(); bij.update(save_b)
        rev.clear(); rev.update(save_r)
    return False


def variant_of(c1: Clause, c2: Clause, ordered_body: bool = False) -> bool:
    """True iff c1 and c2 are equal modulo a variable bijection.

    Body atoms are matched as a multiset unless ordered_body is set; the
    constraint is compared structurally (same And-flattened shape).
    """
    if (c1.head is None) != (c2.head is None):
        return False
    bij: dict[Var, Var] = {}
    rev: dict[Var, Var] = {}
    if c1.head is not None:
        if c1.head.pred != c2.head.pred or len(c1.head.args) != len(c2.head.args):
            return False
        if not all(_match_term(p, t, bij, rev)
                   for p, t in zip(c1.head.args, c2.head.args)):
            return False
    if not _match_formula(c1.constraint, c2.constraint, bij, rev):
        return False
    if ordered_body:
        if len(c1.body) != len(c2.body):
            return False
        for a, b in zip(c1.body, c2.body):
            if a.pred != b.pred or len(a.args) != len(b.args):
                return False
            if not all(_match_term(p, t, bij, rev) for p, t in zip(a.args, b.args)):
                return False
        return True
    return _match_atoms_multiset(c1.body, c2.body, bij, rev)


# ---------------------------------------------------------------------------
# Pretty printing (canonical per-clause display names)
# ---------------------------------------------------------------------------

def _display_names() -> Iterator[str]:
    for c in "ABCDEFGHIJKLMNOPQRSTUVWXYZ":
        yield c
    for n in itertools.count(1):
        for c in "ABCDEFGHIJKLMNOPQRSTUVWXYZ":
            yield f"{c}{n}"


def display_renaming(c: Clause) -> Subst:
    """First-occurrence display renaming: head, then constraint, then body."""
    order: list[Var] = []
    seen: set[Var] = set()

    def visit_term(t: Term) -> None:
        if isinstance(t, Var):
            if t not in seen:
                seen.add(t)
                order.append(t)
        elif isinstance(t, LinExpr):
            for v, _ in t.coeffs:
                visit_term(v)
        elif isinstance(t, Ctor):
            for a in t.args:
                visit_term(a)
        elif isinstance(t, TermIte):
            visit_formula(t.cond)
            visit_term(t.then)
            visit_term(t.els)

    def visit_formula(f: Formula) -> None:
        if isinstance(f, FVar):
            visit_term(f.var)
        elif isinstance(f, FNot):
            visit_formula(f.arg)
        elif isinstance(f, (FAnd, FOr)):
            for a in f.args:
                visit_formula(a)
        elif isinstance(f, (FImp, FIff)):
            visit_formula(f.lhs)
            visit_formula(f.rhs)
        elif isinstance(f, FIte):
            visit_formula(f.cond)
            visit_formula(f.then)
            visit_formula(f.els)
        elif isinstance(f, (FComp, FEq)):
            visit_term(f.lhs)
            visit_term(f.rhs)

    if c.head is not None:
        for a in c.head.args:
            visit_term(a)
    visit_formula(c.constraint)
    for at in c.body:
        for a in at.args:
            visit_term(a)
    names = _display_names()
    return Subst({v: Var(next(names), v.sort) for v in order})


def pretty_term(t: Term) -> str:
    if isinstance(t, Ctor):
        if t.ctor == "[]":
            return "[]"
        if t.ctor == "cons":
            items: list[str] = []
            cur: Term = t
            while isinstance(cur, Ctor) and cur.ctor == "cons":
                items.append(pretty_term(cur.args[0]))
                cur = cur.args[1]
            if isinstance(cur, Ctor) and cur.ctor == "[]":
                return "[" + ",".join(items) + "]"
            return "[" + ",".join(items) + "|" + pretty_term(cur) + "]"
        if not t.args:
            return t.ctor
        return f"{t.ctor}({','.join(pretty_term(a) for a in t.args)})"
    return str(t)


def pretty_clause(c: Clause, display: bool = True) -> str:
    if display:
        c = display_renaming(c).clause(c)
    head = "false" if c.head is None else str(c.head)
    parts: list[str] = []
    if not isinstance(c.constraint, FTrue):
        parts.extend(str(f) for f in conjuncts(c.constraint))
    parts.extend(str(a) for a in c.body)
    if not parts:
        return f"{head}."
    return f"{head} :- {', '.join(parts)}."
