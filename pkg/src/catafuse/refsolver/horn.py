"""Reference CHC solver: `python -m catafuse.refsolver.horn file.smt2`.

Decides satisfiability of Horn clause scripts in the emitted dialect and
prints sat, unsat, or unknown:

  * unsat by bounded bottom-up derivation: constrained facts are saturated
    breadth-first; a query whose premise becomes definitively satisfiable
    yields a refutation, so the verdict is exact;
  * sat by Houdini-style invariant inference: candidate atoms are mined from
    clause constraints, query contracts, and head patterns, then pruned to
    the largest inductive conjunction; if the surviving assignment falsifies
    every query premise it is a genuine model, so the verdict is exact;
  * unknown otherwise.

Designed for desk-scale problems; a production solver (z3/SPACER) remains a
drop-in via the driver configuration.
"""

from __future__ import annotations

import sys
import time

from ..syntax import (
    BOOL, Atom, Clause, FComp, FImp, FNot, FVar, Formula, IntConst,
    NameGen, Subst, Term, TRUE, Var, conjuncts, eq_of, free_vars, mk_and,
    mk_not, term_sort, unify_terms, variant_of,
)
from . import qfcore
from .smtparse import SmtContext, UnsupportedSmt, parse_sexps

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"


def read_script(text: str) -> tuple[list[Clause], SmtContext]:
    ctx = SmtContext()
    clauses: list[Clause] = []
    for cmd in parse_sexps(text):
        if not isinstance(cmd, list) or not cmd:
            continue
        op = cmd[0]
        if op == "declare-datatypes":
            ctx.declare_datatypes(cmd[1], cmd[2])
        elif op == "declare-fun":
            ctx.declare_fun(cmd[1], cmd[2], cmd[3])
        elif op == "declare-const":
            ctx.declare_fun(cmd[1], [], cmd[2])
        elif op == "assert":
            clauses.append(ctx.to_clause(cmd[1]))
        elif op in ("set-logic", "set-option", "set-info", "check-sat", "exit"):
            continue
        else:
            raise UnsupportedSmt(f"unsupported command {op}")
    return clauses, ctx


# ---------------------------------------------------------------------------
# Bounded bottom-up refutation
# ---------------------------------------------------------------------------

class _Facts:
    def __init__(self, cap_per_pred: int) -> None:
        self.by_pred: dict[str, list[tuple[tuple[Term, ...], Formula]]] = {}
        self.cap = cap_per_pred
        self.saturated = True  # flips when a cap truncates anything

    def add(self, pred: str, args: tuple[Term, ...], c: Formula) -> bool:
        row = self.by_pred.setdefault(pred, [])
        probe = Clause(Atom(pred, args), c, ())
        for a2, c2 in row:
            if variant_of(Clause(Atom(pred, a2), c2, ()), probe):
                return False
        if len(row) >= self.cap:
            self.saturated = False
            return False
        row.append((args, c))
        return True


def _join(clause: Clause, facts: _Facts, gen: NameGen, budget: qfcore.Budget,
          limit: int) -> list[tuple[tuple[Term, ...] | None, Formula]]:
    """All derivable head instances of clause from current facts."""
    out: list[tuple[tuple[Term, ...] | None, Formula]] = []
    state = [(Subst(), clause.constraint, 0)]
    for atom in clause.body:
        rows = facts.by_pred.get(atom.pred, [])
        nxt = []
        for s, c, _ in state:
            for fargs, fc in rows:
                ren = {v: gen.fresh_var(v.sort) for v in
                       sorted(free_vars(list(fargs)) | free_vars(fc),
                              key=lambda w: w.name)}
                r = Subst(ren)
                fargs2 = tuple(r.term(t) for t in fargs)
                fc2 = r.formula(fc)
                s2 = s
                extra: list[Formula] = []
                ok = True
                for pa, fa in zip(atom.args, fargs2):
                    u = unify_terms(s2.term(pa), s2.term(fa))
                    if u is None:
                        pa_s, fa_s = s2.term(pa), s2.term(fa)
                        st = term_sort(pa_s)
                        if st.is_adt:
                            ok = False  # constructor clash
                            break
                        extra.append(eq_of(pa_s, fa_s, st))
                    else:
                        s2 = s2.compose(u)
                if not ok:
                    continue
                cns = mk_and(s2.formula(c), fc2,
                             *(s2.formula(e) for e in extra))
                # prune dead partial joins early; unknown survives
                if qfcore.check_sat(cns, qfcore.Budget(20_000)) == qfcore.UNSAT:
                    continue
                nxt.append((s2, cns, 0))
                if len(nxt) > limit:
                    facts.saturated = False
                    break
            if len(nxt) > limit:
                break
        state = nxt
        if not state:
            return []
    for s, c, _ in state:
        verdict = qfcore.check_sat(c, qfcore.Budget(60_000, budget.deadline))
        if verdict == qfcore.UNSAT:
            continue
        if verdict == qfcore.UNKNOWN:
            facts.saturated = False
            continue
        head = None if clause.head is None else tuple(
            s.term(t) for t in clause.head.args)
        out.append((head, c))
    return out


def refute(clauses: list[Clause], deadline: float | None, rounds: int,
           cap: int, joins: int) -> tuple[str, dict]:
    """unsat if a query fires; sat if saturation completes exactly; else
    unknown. Also returns the derived facts (reachable under-approximation)."""
    gen = NameGen("r")
    facts = _Facts(cap)
    queries = [c for c in clauses if c.head is None]
    definite = [c for c in clauses if c.head is not None]
    budget = qfcore.Budget(deadline=deadline)
    for _ in range(rounds):
        if deadline is not None and time.monotonic() > deadline:
            return UNKNOWN, facts.by_pred
        grew = False
        for c in definite:
            for head, cns in _join(c, facts, gen, budget, joins):
                if facts.add(c.head.pred, head, cns):
                    grew = True
        for q in queries:
            if _join(q, facts, gen, budget, joins):
                return UNSAT, facts.by_pred
        if not grew:
            verdict = SAT if facts.saturated else UNKNOWN
            return verdict, facts.by_pred
    return UNKNOWN, facts.by_pred


# ---------------------------------------------------------------------------
# Houdini-style invariant inference
# ---------------------------------------------------------------------------

def _pos_vars(pred: str, sorts: tuple, cache: dict) -> list[Var]:
    if pred not in cache:
        cache[pred] = [Var(f"{pred}!{i}", s) for i, s in enumerate(sorts)]
    return cache[pred]


def _mine(clauses: list[Clause], preds: dict[str, tuple], pv: dict) -> dict[str, list[Formula]]:
    cands: dict[str, list[Formula]] = {p: [] for p in preds}
    facts: dict[str, list[Formula]] = {p: [] for p in preds}
    guards: dict[str, list[Formula]] = {p: [] for p in preds}

    def add(tbl: dict[str, list[Formula]], pred: str, f: Formula) -> None:
        if f != TRUE and f not in tbl[pred]:
            tbl[pred].append(f)

    def posmap(args: tuple[Term, ...], pred: str) -> dict[Var, Var]:
        vs = _pos_vars(pred, preds[pred], pv)
        m: dict[Var, Var] = {}
        for i, t in enumerate(args):
            if isinstance(t, Var) and t not in m:
                m[t] = vs[i]
        return m

    def mapped(f: Formula, m: dict[Var, Var]) -> Formula | None:
        fv = free_vars(f)
        if not fv or not fv <= set(m):
            return None
        return Subst(dict(m)).formula(f)

    def note_fact(pred: str, g: Formula) -> None:
        add(facts, pred, g)
        if isinstance(g, FVar) or (isinstance(g, FNot) and isinstance(g.arg, FVar)):
            add(guards, pred, g)
            add(guards, pred, mk_not(g))

    for c in clauses:
        parts = conjuncts(c.constraint)
        if c.head is not None:
            pred = c.head.pred
            vs = _pos_vars(pred, preds[pred], pv)
            m = posmap(c.head.args, pred)
            for f in parts:
                g = mapped(f, m)
                if g is not None:
                    note_fact(pred, g)
            firstpos: dict[Var, int] = {}
            for i, t in enumerate(c.head.args):
                if isinstance(t, Var):
                    if t in firstpos and preds[pred][i].is_basic:
                        note_fact(pred, eq_of(vs[firstpos[t]], vs[i],
                                              preds[pred][i]))
                    else:
                        firstpos.setdefault(t, i)
                elif isinstance(t, (IntConst,)):
                    note_fact(pred, FComp("=", vs[i], t))
        if c.head is None:
            negated = mk_not(c.constraint)
            for a in c.body:
                m = posmap(a.args, a.pred)
                g = mapped(negated, m)
                if g is not None:
                    add(cands, a.pred, g)  # query contract: keep unguarded
        else:
            for a in c.body:
                m = posmap(a.args, a.pred)
                for f in parts:
                    g = mapped(f, m)
                    if g is not None:
                        note_fact(a.pred, g)

    # every boolean position contributes both literals (case flags like the
    # first/last emptiness booleans rarely show up in every defining clause),
    # plus equalities between same-sorted basic positions (e.g. "the last
    # element of the output equals the inserted element")
    for pred, sorts in preds.items():
        vs = _pos_vars(pred, sorts, pv)
        for i, s in enumerate(sorts):
            if s == BOOL:
                note_fact(pred, FVar(vs[i]))
                note_fact(pred, mk_not(FVar(vs[i])))
        basics = [i for i, s in enumerate(sorts) if s.is_basic]
        for ai, i in enumerate(basics):
            for j in basics[ai + 1:]:
                if sorts[i] == sorts[j]:
                    add(facts, pred, eq_of(vs[i], vs[j], sorts[i]))

    # plain facts, then guard => fact implications (the per-constructor facts
    # of a structural predicate become inductive once guarded by the boolean
    # that distinguishes the constructors, e.g. the first/last "non-empty" flag)
    for pred in preds:
        for f in facts[pred]:
            add(cands, pred, f)
        for g in guards[pred]:
            for f in facts[pred]:
                if f == g or f == mk_not(g) or mk_not(f) == g:
                    continue
                add(cands, pred, FImp(g, f))
    return cands


def _inst(pred: str, args: tuple[Term, ...], inv: dict[str, list[Formula]],
          pv: dict, preds: dict) -> Formula:
    vs = _pos_vars(pred, preds[pred], pv)
    s = Subst({v: t for v, t in zip(vs, args)})
    return mk_and(*(s.formula(f) for f in inv[pred]))


def _relevant(conjs: list[Formula], seed: set[Var]) -> list[Formula]:
    """Conjuncts var-connected to the seed set (transitively)."""
    picked: list[Formula] = []
    pending = [(f, free_vars(f)) for f in conjs]
    grown = True
    while grown:
        grown = False
        rest = []
        for f, fv in pending:
            if not fv or fv & seed:
                picked.append(f)
                if not fv <= seed:
                    seed |= fv
                    grown = True
            else:
                rest.append((f, fv))
        pending = rest
    return picked


def _preprune(inv: dict[str, list[Formula]], samples: dict, pv: dict,
              preds: dict, deadline: float | None) -> None:
    """Drop candidates falsified by a derived reachable fact: much cheaper
    than discovering the same thing through a full inductiveness check."""
    for pred, cands in inv.items():
        rows = samples.get(pred, [])[:24]
        if not rows:
            continue
        keep: list[Formula] = []
        vs = _pos_vars(pred, preds[pred], pv)
        for cand in cands:
            ok = True
            for args, cns in rows:
                s = Subst({v: t for v, t in zip(vs, args)})
                q = mk_and(cns, mk_not(s.formula(cand)))
                if qfcore.check_sat(q, qfcore.Budget(30_000)) == qfcore.SAT:
                    ok = False
                    break
            if ok:
                keep.append(cand)
        inv[pred] = keep


def houdini(clauses: list[Clause], preds: dict[str, tuple],
            deadline: float | None,
            samples: dict | None = None) -> str:
    pv: dict = {}
    inv = _mine(clauses, preds, pv)
    if samples:
        _preprune(inv, samples, pv, preds, deadline)
    definite = [c for c in clauses if c.head is not None]
    queries = [c for c in clauses if c.head is None]

    def check(c: Clause, goal: Formula) -> str:
        base = list(conjuncts(c.constraint))
        inst: list[Formula] = []
        for a in c.body:
            inst.extend(conjuncts(_inst(a.pred, a.args, inv, pv, preds)))
        seed = free_vars(c.constraint) | free_vars(goal)
        picked = _relevant(inst, seed)
        q = mk_and(*base, *picked, mk_not(goal))
        return qfcore.check_sat(q, qfcore.Budget(deadline=deadline))

    changed = True
    while changed:
        changed = False
        if deadline is not None and time.monotonic() > deadline:
            return UNKNOWN
        for c in definite:
            if not inv[c.head.pred]:
                continue
            vs = _pos_vars(c.head.pred, preds[c.head.pred], pv)
            s = Subst({v: t for v, t in zip(vs, c.head.args)})
            keep: list[Formula] = []
            for cand in inv[c.head.pred]:
                if check(c, s.formula(cand)) == qfcore.UNSAT:
                    keep.append(cand)
                else:
                    changed = True
            inv[c.head.pred] = keep
    for q in queries:
        from ..syntax import FALSE
        if check(q, FALSE) != qfcore.UNSAT:
            return UNKNOWN
    return SAT


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def solve_clauses(clauses: list[Clause], preds: dict[str, tuple],
                  timeout: float | None = None) -> str:
    t0 = time.monotonic()
    deadline = None if timeout is None else t0 + timeout

    def slice_deadline(frac: float) -> float | None:
        if deadline is None:
            return None
        return min(deadline, time.monotonic() + frac * (deadline - t0))

    r, samples = refute(clauses, slice_deadline(0.2), rounds=4, cap=40, joins=250)
    if r in (SAT, UNSAT):
        return r
    r = houdini(clauses, preds, slice_deadline(0.75), samples)
    if r == SAT:
        return SAT
    r, _ = refute(clauses, deadline, rounds=9, cap=220, joins=1600)
    if r in (SAT, UNSAT):
        return r
    return UNKNOWN


def solve_script(text: str, timeout: float | None = None) -> str:
    try:
        clauses, ctx = read_script(text)
    except UnsupportedSmt as e:
        print(f'(error "{e}")', file=sys.stderr)
        return UNKNOWN
    return solve_clauses(clauses, ctx.preds, timeout)


def main(argv: list[str]) -> int:
    args = list(argv)
    timeout = None
    if "-t" in args:
        i = args.index("-t")
        timeout = float(args[i + 1])
        del args[i:i + 2]
    if len(args) != 1:
        print("usage: horn [-t seconds] file.smt2", file=sys.stderr)
        return 2
    with open(args[0], encoding="utf-8") as fh:
        text = fh.read()
    print(solve_script(text, timeout), flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
