"""Decision core for quantifier-free LIA + Bool + constructor equality.

check_sat decides formulas built from linear integer atoms, boolean
variables, the usual connectives, ite (both levels), and equalities over
algebraic data type terms. The procedure is a small DPLL over the atom
skeleton with a theory check per complete assignment:

  * integers: Gaussian substitution on unit-coefficient equalities, then
    Fourier-Motzkin elimination with integer tightening; eliminations are
    exact while some side of every combined pair has unit coefficient
    (always the case for the clause constraints this package produces),
    otherwise a bounded branch-and-bound pass confirms or gives 'unknown';
  * constructor terms: congruence closure with injectivity, clash, and
    acyclicity; derived equalities on integer arguments feed the LIA check.

Everything answers sat/unsat/unknown and never lies: 'unknown' is returned
whenever a budget or an unsupported corner (e.g. boolean-element ADTs
forcing an undecided boolean equality) is hit.
"""

from __future__ import annotations

from math import gcd

from ..syntax import (
    BOOL, FAnd, FComp, FEq, FFalse, FIff, FImp, FIte, FNot, FOr, FTrue, FVar,
    Formula, IntConst, LinExpr, BoolConst, Ctor, Sort, Term, TermIte,
    TRUE, FALSE, Var, lin, lin_sub, mk_and, mk_not, mk_or, term_sort,
)

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


class Budget:
    def __init__(self, steps: int = 400_000, deadline: float | None = None) -> None:
        self.steps = steps
        self.deadline = deadline
        self.exhausted = False
        self._tick = 0

    def spend(self, n: int = 1) -> bool:
        self.steps -= n
        if self.steps <= 0:
            self.exhausted = True
        self._tick += 1
        if self.deadline is not None and self._tick % 512 == 0:
            import time
            if time.monotonic() > self.deadline:
                self.exhausted = True
        return not self.exhausted


# ---------------------------------------------------------------------------
# ite elimination
# ---------------------------------------------------------------------------

def _find_term_ite(t: Term) -> TermIte | None:
    if isinstance(t, TermIte):
        return t
    if isinstance(t, Ctor):
        for a in t.args:
            found = _find_term_ite(a)
            if found is not None:
                return found
    return None


def _replace_term(t: Term, old: Term, new: Term) -> Term:
    if t == old:
        return new
    if isinstance(t, Ctor):
        return Ctor(t.sort, t.ctor, tuple(_replace_term(a, old, new) for a in t.args))
    return t


def elim_ite(f: Formula) -> Formula:
    if isinstance(f, (FTrue, FFalse, FVar)):
        return f
    if isinstance(f, FNot):
        return mk_not(elim_ite(f.arg))
    if isinstance(f, FAnd):
        return mk_and(*(elim_ite(a) for a in f.args))
    if isinstance(f, FOr):
        return mk_or(*(elim_ite(a) for a in f.args))
    if isinstance(f, FImp):
        return mk_or(mk_not(elim_ite(f.lhs)), elim_ite(f.rhs))
    if isinstance(f, FIff):
        a, b = elim_ite(f.lhs), elim_ite(f.rhs)
        return mk_or(mk_and(a, b), mk_and(mk_not(a), mk_not(b)))
    if isinstance(f, FIte):
        c = elim_ite(f.cond)
        return mk_or(mk_and(c, elim_ite(f.then)),
                     mk_and(mk_not(c), elim_ite(f.els)))
    if isinstance(f, (FComp, FEq)):
        for side in ("lhs", "rhs"):
            ite = _find_term_ite(getattr(f, side))
            if ite is not None:
                then_f = _atom_replace(f, ite, ite.then)
                else_f = _atom_replace(f, ite, ite.els)
                c = elim_ite(ite.cond)
                return mk_or(mk_and(c, elim_ite(then_f)),
                             mk_and(mk_not(c), elim_ite(else_f)))
        return f
    raise TypeError(f"unknown formula {f!r}")


def _atom_replace(f: Formula, old: Term, new: Term) -> Formula:
    if isinstance(f, FComp):
        return FComp(f.rel, _replace_term(f.lhs, old, new),
                     _replace_term(f.rhs, old, new))
    if isinstance(f, FEq):
        return FEq(_replace_term(f.lhs, old, new),
                   _replace_term(f.rhs, old, new), f.sort)
    raise TypeError


# LinExpr cannot syntactically contain ite, but parsing SMT input can produce
# (+ x (ite c a b)); smtparse pre-lifts those, so only Ctor nesting matters here.


# ---------------------------------------------------------------------------
# Atom canonicalization
# ---------------------------------------------------------------------------

def canon_atom(f: Formula) -> Formula:
    """FComp atoms become  t <= 0  or  t = 0  with t canonical linear."""
    if isinstance(f, FComp):
        d = lin_sub(f.lhs, f.rhs)
        if f.rel == "=":
            return FComp("=", d, IntConst(0))
        if f.rel == "=<":
            return FComp("=<", d, IntConst(0))
        if f.rel == "<":
            return FComp("=<", lin_sub(d, IntConst(-1)), IntConst(0))
        if f.rel == ">=":
            return FComp("=<", lin_sub(IntConst(0), d), IntConst(0))
        if f.rel == ">":
            return FComp("=<", lin_sub(IntConst(1), d), IntConst(0))
    return f


def canonize(f: Formula) -> Formula:
    if isinstance(f, (FComp,)):
        g = canon_atom(f)
        if isinstance(g, FComp) and isinstance(g.lhs, IntConst):
            return TRUE if _const_holds(g) else FALSE
        return g
    if isinstance(f, FEq):
        if f.lhs == f.rhs:
            return TRUE
        return f
    if isinstance(f, FNot):
        return mk_not(canonize(f.arg))
    if isinstance(f, FAnd):
        return mk_and(*(canonize(a) for a in f.args))
    if isinstance(f, FOr):
        return mk_or(*(canonize(a) for a in f.args))
    return f


def _const_holds(g: FComp) -> bool:
    v = g.lhs.value  # type: ignore[union-attr]
    return v == 0 if g.rel == "=" else v <= 0


# ---------------------------------------------------------------------------
# DPLL over the atom skeleton
# ---------------------------------------------------------------------------

def _first_atom(f: Formula) -> Formula | None:
    if isinstance(f, (FComp, FEq, FVar)):
        return f
    if isinstance(f, FNot):
        return _first_atom(f.arg)
    if isinstance(f, (FAnd, FOr)):
        for a in f.args:
            got = _first_atom(a)
            if got is not None:
                return got
    return None


def _assign(f: Formula, atom: Formula, val: bool) -> Formula:
    if f == atom:
        return TRUE if val else FALSE
    if isinstance(f, FNot):
        return mk_not(_assign(f.arg, atom, val))
    if isinstance(f, FAnd):
        return mk_and(*(_assign(a, atom, val) for a in f.args))
    if isinstance(f, FOr):
        return mk_or(*(_assign(a, atom, val) for a in f.args))
    return f


def check_sat(f: Formula, budget: Budget | None = None) -> str:
    budget = budget or Budget()
    f = canonize(elim_ite(f))
    return _dpll(f, {}, budget)


def _unit(f: Formula) -> tuple[Formula, bool] | None:
    """A top-level unit literal, if any (forces one polarity first)."""
    args = f.args if isinstance(f, FAnd) else (f,)
    for a in args:
        if isinstance(a, (FComp, FEq, FVar)):
            return a, True
        if isinstance(a, FNot) and isinstance(a.arg, (FComp, FEq, FVar)):
            return a.arg, False
    return None


def _dpll(f: Formula, lits: dict[Formula, bool], budget: Budget) -> str:
    if not budget.spend():
        return UNKNOWN
    if isinstance(f, FFalse):
        return UNSAT
    if isinstance(f, FTrue):
        return _theory_check(lits, budget)
    unit = _unit(f)
    if unit is not None:
        # unit propagation: the opposite polarity falsifies a top conjunct
        atom, val = unit
        lits[atom] = val
        r = _dpll(_assign(f, atom, val), lits, budget)
        del lits[atom]
        return r
    atom = _first_atom(f)
    if atom is None:  # only connectives over constants; canonize left none
        return UNKNOWN
    out = UNSAT
    for val in (True, False):
        lits[atom] = val
        r = _dpll(_assign(f, atom, val), lits, budget)
        del lits[atom]
        if r == SAT:
            return SAT
        if r == UNKNOWN:
            out = UNKNOWN
    return out


# ---------------------------------------------------------------------------
# Theory: congruence closure over constructor terms
# ---------------------------------------------------------------------------

class _CC:
    def __init__(self) -> None:
        self.parent: dict[Term, Term] = {}
        self.int_eqs: list[tuple[Term, Term]] = []
        self.bool_eqs: list[tuple[Term, Term]] = []

    def find(self, t: Term) -> Term:
        while self.parent.get(t, t) != t:
            self.parent[t] = self.parent.get(self.parent[t], self.parent[t])
            t = self.parent[t]
        return t

    def union(self, a: Term, b: Term) -> bool:
        """False on conflict (clash or cycle)."""
        a, b = self.find(a), self.find(b)
        if a == b:
            return True
        if isinstance(a, Ctor) and isinstance(b, Ctor):
            if a.sort != b.sort or a.ctor != b.ctor:
                return False
            for x, y in zip(a.args, b.args):
                s = term_sort(x)
                if s.is_adt:
                    if not self.union(x, y):
                        return False
                elif s == BOOL:
                    self.bool_eqs.append((x, y))
                else:
                    self.int_eqs.append((x, y))
            return True
        # orient: variables point at terms
        if isinstance(b, Var):
            a, b = b, a
        if isinstance(a, Var):
            if self._occurs(a, b):
                return False
            self.parent[a] = b
            return True
        return False

    def _occurs(self, v: Var, t: Term) -> bool:
        t = self.find(t)
        if t == v:
            return True
        if isinstance(t, Ctor):
            return any(term_sort(a).is_adt and self._occurs(v, a) for a in t.args)
        return False

    def canon(self, t: Term) -> Term:
        t = self.find(t)
        if isinstance(t, Ctor):
            return Ctor(t.sort, t.ctor,
                        tuple(self.canon(a) if term_sort(a).is_adt else a
                              for a in t.args))
        return t

    def surely_distinct(self, a: Term, b: Term) -> bool:
        """True when the closure forces a != b (constructor clash somewhere)."""
        ca, cb = self.canon(a), self.canon(b)
        return self._clash(ca, cb)

    def _clash(self, a: Term, b: Term) -> bool:
        if isinstance(a, Ctor) and isinstance(b, Ctor):
            if a.sort != b.sort or a.ctor != b.ctor:
                return True
            return any(self._clash(x, y) for x, y in zip(a.args, b.args)
                       if term_sort(x).is_adt)
        return False


def _theory_check(lits: dict[Formula, bool], budget: Budget) -> str:
    cc = _CC()
    diseqs: list[tuple[Term, Term]] = []
    lia_le: list[tuple[dict[Var, int], int]] = []   # sum c·v + k <= 0
    lia_eq: list[tuple[dict[Var, int], int]] = []
    for atom, val in lits.items():
        if isinstance(atom, FVar):
            continue
        if isinstance(atom, FEq):
            if val:
                if not cc.union(atom.lhs, atom.rhs):
                    return UNSAT
            else:
                diseqs.append((atom.lhs, atom.rhs))
        elif isinstance(atom, FComp):
            coeffs, k = _lin_view(atom.lhs)
            if atom.rel == "=<":
                if val:
                    lia_le.append((coeffs, k))
                else:  # not(t <= 0)  ==  -t + 1 <= 0
                    lia_le.append(({v: -a for v, a in coeffs.items()}, 1 - k))
            else:  # "="
                if val:
                    lia_eq.append((coeffs, k))
                else:
                    diseqs.append((lin(coeffs, k), IntConst(0)))
    # equalities derived from constructor decomposition
    for x, y in cc.int_eqs:
        cx, kx = _lin_view(x)
        cy, ky = _lin_view(y)
        for v, a in cy.items():
            cx[v] = cx.get(v, 0) - a
        lia_eq.append((cx, kx - ky))
    for x, y in cc.bool_eqs:
        r = _bool_eq_status(x, y, lits)
        if r is False:
            return UNSAT
        if r is None:
            return UNKNOWN
    # disequalities: ADT ones must not be forced equal; int ones branch
    int_diseqs: list[tuple[dict[Var, int], int]] = []
    for a, b in diseqs:
        if isinstance(a, (Var, Ctor)) and term_sort(a).is_adt:
            if cc.canon(a) == cc.canon(b):
                return UNSAT
            if not cc.surely_distinct(a, b):
                # free ADT variables always admit distinct values over an
                # infinite datatype; basic-argument mismatches go to LIA
                pair = _forced_basic_eqs(cc.canon(a), cc.canon(b))
                if pair is None:
                    continue
                ca, kka = pair
                int_diseqs.append((ca, kka))
            continue
        cx, kx = _lin_view(a)
        cy, ky = _lin_view(b)
        for v, x in cy.items():
            cx[v] = cx.get(v, 0) - x
        int_diseqs.append((cx, kx - ky))
    return _lia_with_diseqs(lia_eq, lia_le, int_diseqs, budget)


def _forced_basic_eqs(a: Term, b: Term) -> tuple[dict[Var, int], int] | None:
    """If a != b reduces to a single integer disequality, return it."""
    if isinstance(a, Ctor) and isinstance(b, Ctor) and a.ctor == b.ctor:
        diffs = []
        for x, y in zip(a.args, b.args):
            if x == y:
                continue
            diffs.append((x, y))
        if len(diffs) == 1 and term_sort(diffs[0][0]) == Sort("int"):
            cx, kx = _lin_view(diffs[0][0])
            cy, ky = _lin_view(diffs[0][1])
            for v, s in cy.items():
                cx[v] = cx.get(v, 0) - s
            return cx, kx - ky
    return None


def _bool_eq_status(x: Term, y: Term, lits: dict[Formula, bool]) -> bool | None:
    def val(t: Term) -> bool | None:
        if isinstance(t, BoolConst):
            return t.value
        if isinstance(t, Var):
            return lits.get(FVar(t))
        return None

    vx, vy = val(x), val(y)
    if vx is None or vy is None:
        if isinstance(x, Var) and isinstance(y, Var) and x == y:
            return True
        return None
    return vx == vy


def _lin_view(t: Term) -> tuple[dict[Var, int], int]:
    if isinstance(t, Var):
        return {t: 1}, 0
    if isinstance(t, IntConst):
        return {}, t.value
    if isinstance(t, LinExpr):
        return dict(t.coeffs), t.const
    raise TypeError(f"not linear: {t!r}")


# ---------------------------------------------------------------------------
# Integer linear feasibility
# ---------------------------------------------------------------------------

def _lia_with_diseqs(eqs, les, diseqs, budget: Budget) -> str:
    if not budget.spend(len(diseqs) + 1):
        return UNKNOWN
    if not diseqs:
        return _lia_feasible(eqs, les, budget)
    (c, k), rest = diseqs[0], diseqs[1:]
    if not c:
        if k == 0:
            return UNSAT
        return _lia_with_diseqs(eqs, les, rest, budget)
    out = UNSAT
    # t != 0  ->  t <= -1  or  -t <= -1
    for sgn in (1, -1):
        le = ({v: sgn * a for v, a in c.items()}, sgn * k + 1)
        r = _lia_with_diseqs(eqs, les + [le], rest, budget)
        if r == SAT:
            return SAT
        if r == UNKNOWN:
            out = UNKNOWN
    return out


def _tighten(c: dict[Var, int], k: int) -> tuple[dict[Var, int], int]:
    """Divide sum(c)v + k <= 0 by gcd(c) with exact integer rounding."""
    c = {v: a for v, a in c.items() if a != 0}
    g = gcd(*[abs(a) for a in c.values()]) if c else 1
    if g > 1:
        c = {v: a // g for v, a in c.items()}
        k = -((-k) // g)
    return c, k


def _lia_feasible(eqs, les, budget: Budget) -> str:
    eqs = [({v: a for v, a in c.items() if a != 0}, k) for c, k in eqs]
    les = [_tighten(c, k) for c, k in les]

    # Gaussian elimination: solve unit-coefficient equalities, normalize the
    # rest by gcd, and turn stubborn ones into inequality pairs.
    while eqs:
        c, k = eqs.pop()
        c = {v: a for v, a in c.items() if a != 0}
        if not c:
            if k != 0:
                return UNSAT
            continue
        g = gcd(*[abs(a) for a in c.values()])
        if g > 1:
            if k % g != 0:
                return UNSAT
            c = {v: a // g for v, a in c.items()}
            k //= g
        unit = next((v for v, a in sorted(c.items(), key=lambda p: p[0].name)
                     if abs(a) == 1), None)
        if unit is not None:
            a = c[unit]
            # a*unit + rest + k = 0  =>  unit = -a*(rest + k)
            sub_c = {v: -x * a for v, x in c.items() if v != unit}
            sub_k = -k * a
            _substitute(eqs, unit, sub_c, sub_k)
            _substitute(les, unit, sub_c, sub_k)
        else:
            les.append((dict(c), k))
            les.append(({v: -a for v, a in c.items()}, -k))

    exact = True
    while True:
        les = _dedup([_tighten(c, k) for c, k in les])
        for c, k in les:
            if not c and k > 0:
                return UNSAT
        les = [(c, k) for c, k in les if c]
        vs = sorted({v for c, _ in les for v in c}, key=lambda v: v.name)
        if not vs:
            return SAT if exact else UNKNOWN
        if not budget.spend(len(les)):
            return UNKNOWN

        def cost(v: Var) -> int:
            lo = sum(1 for c, _ in les if c.get(v, 0) < 0)
            hi = sum(1 for c, _ in les if c.get(v, 0) > 0)
            return lo * hi

        x = min(vs, key=lambda v: (cost(v), v.name))
        lows = [(c, k) for c, k in les if c.get(x, 0) < 0]
        highs = [(c, k) for c, k in les if c.get(x, 0) > 0]
        rest = [(c, k) for c, k in les if c.get(x, 0) == 0]
        new = list(rest)
        for cl, kl in lows:
            al = -cl[x]
            for ch, kh in highs:
                ah = ch[x]
                if min(al, ah) != 1:
                    exact = False  # real shadow only: sat would be unsound
                comb: dict[Var, int] = {}
                for v, a in cl.items():
                    if v != x:
                        comb[v] = comb.get(v, 0) + ah * a
                for v, a in ch.items():
                    if v != x:
                        comb[v] = comb.get(v, 0) + al * a
                kk = ah * kl + al * kh
                new.append(_tighten(comb, kk))
                if len(new) > 4000:
                    return UNKNOWN
        les = new


def _dedup(les):
    seen = set()
    out = []
    for c, k in les:
        key = (tuple(sorted(((v.name, a) for v, a in c.items()))), k)
        if key not in seen:
            seen.add(key)
            out.append((c, k))
    return out


def _substitute(rows, var: Var, sub_c: dict[Var, int], sub_k: int) -> None:
    for i, (c, k) in enumerate(rows):
        a = c.get(var)
        if a is None:
            continue
        nc = {v: x for v, x in c.items() if v != var}
        for v, x in sub_c.items():
            nc[v] = nc.get(v, 0) + a * x
            if nc[v] == 0:
                del nc[v]
        rows[i] = (nc, k + a * sub_k)
