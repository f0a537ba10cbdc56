"""The clause transformation: definition introduction, unfolding,
query-based strengthening, folding, and the fixpoint that drives them.

The pipeline rewrites a validated problem into an equisatisfiable clause set
in which every emitted predicate fuses one program predicate with the
catamorphism atoms its query (and the queries of everything it calls) needs.
Each rule application is recorded in a replayable derivation log.

Conventions that matter for reading this module:

  * a Definition is  newp(U) <- c, folds..., A  with A a program atom; the
    case with no program atom uses the structural builtin true_<sort>(T),
    whose clauses walk the ADT so that unfolding can consume the folds;
  * real program predicates get at most one definition each; true_*
    definitions are keyed by their exact fold signature, so several can
    coexist when differently-shaped orphan groups need carriers;
  * matching a definition against a clause (for Skip/Extend/Fold/extension
    checks) renames the definition, never the clause: program atom first,
    then each clause catamorphism to a definition catamorphism with the same
    predicate and structural argument, leftovers to fresh variables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .catas import QuerySpec, io_split, validate_problem
from .engine import ConstraintEngine, HOLDS, UNSAT
from .syntax import (
    Atom, Clause, Ctor, FComp, FEq, FIff, FVar, Formula, NameGen, PRED_CATA,
    PRED_PROGRAM, PRED_TRUE, PredDecl, Problem, Sort, Subst, Term, TRUE, Var,
    conjuncts, eq_of, free_vars, mgu, mk_and, mk_not, pretty_clause,
    rename_apart, term_sort, variant_of,
)


class TransformError(Exception):
    pass


# ---------------------------------------------------------------------------
# Derivation log
# ---------------------------------------------------------------------------

@dataclass
class LogRecord:
    rule: str
    detail: str
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)


class DerivationLog:
    def __init__(self) -> None:
        self.records: list[LogRecord] = []

    def add(self, rule: str, detail: str, inputs: list[Clause] | None = None,
            outputs: list[Clause] | None = None) -> None:
        self.records.append(LogRecord(
            rule, detail,
            [pretty_clause(c) for c in inputs or []],
            [pretty_clause(c) for c in outputs or []]))

    def count(self, rule: str) -> int:
        return sum(1 for r in self.records if r.rule == rule)

    def to_text(self) -> str:
        out = []
        for i, r in enumerate(self.records, 1):
            out.append(f"[{i:04d}] {r.rule}: {r.detail}")
            for c in r.inputs:
                out.append(f"    in:  {c}")
            for c in r.outputs:
                out.append(f"    out: {c}")
        return "\n".join(out) + "\n"

    def to_json(self) -> str:
        return "\n".join(json.dumps({
            "rule": r.rule, "detail": r.detail,
            "inputs": r.inputs, "outputs": r.outputs}) for r in self.records) + "\n"


# ---------------------------------------------------------------------------
# Definitions
# ---------------------------------------------------------------------------

@dataclass
class Definition:
    name: str
    head: Atom
    constraint: Formula
    catas: tuple[Atom, ...]
    prog: Atom

    def clause(self) -> Clause:
        return Clause(self.head, self.constraint,
                      self.catas + (self.prog,), origin="define")

    def cata_signature(self) -> tuple[tuple[str, int], ...]:
        counts: dict[str, int] = {}
        for a in self.catas:
            counts[a.pred] = counts.get(a.pred, 0) + 1
        return tuple(sorted(counts.items()))


def _head_tuple(catas: tuple[Atom, ...], prog: Atom) -> tuple[Var, ...]:
    """Definition head variables: first occurrence over [folds..., atom]."""
    order: list[Var] = []
    seen: set[Var] = set()
    for a in list(catas) + [prog]:
        for t in a.args:
            for v in _term_var_order(t):
                if v not in seen:
                    seen.add(v)
                    order.append(v)
    return tuple(order)


def _term_var_order(t: Term) -> list[Var]:
    if isinstance(t, Var):
        return [t]
    out: list[Var] = []
    if isinstance(t, Ctor):
        for a in t.args:
            out.extend(_term_var_order(a))
    return out


def cata_sig(catas: list[Atom]) -> tuple[tuple[str, int], ...]:
    counts: dict[str, int] = {}
    for a in catas:
        counts[a.pred] = counts.get(a.pred, 0) + 1
    return tuple(sorted(counts.items()))


class DefinitionSet:
    """Monovariant for real program predicates; true_* slots are keyed by
    exact catamorphism signature."""

    def __init__(self) -> None:
        self.order: list[Definition] = []
        self.by_pred: dict[str, Definition] = {}
        self.by_true: dict[tuple[str, tuple], Definition] = {}

    def __len__(self) -> int:
        return len(self.order)

    def __iter__(self):
        return iter(self.order)

    def lookup(self, prog_pred: str, sig: tuple, is_true: bool) -> Definition | None:
        if is_true:
            return self.by_true.get((prog_pred, sig))
        return self.by_pred.get(prog_pred)

    def add(self, d: Definition, is_true: bool) -> None:
        self.order.append(d)
        if is_true:
            key = (d.prog.pred, d.cata_signature())
            if key in self.by_true:
                raise TransformError(f"duplicate true-definition slot {key}")
            self.by_true[key] = d
        else:
            if d.prog.pred in self.by_pred:
                raise TransformError(
                    f"monovariance violated for {d.prog.pred}")
            self.by_pred[d.prog.pred] = d

    def replace(self, old: Definition, new: Definition, is_true: bool) -> None:
        self.order[self.order.index(old)] = new
        if is_true:
            del self.by_true[(old.prog.pred, old.cata_signature())]
            self.by_true[(new.prog.pred, new.cata_signature())] = new
        else:
            self.by_pred[new.prog.pred] = new

    def snapshot(self) -> list[Definition]:
        return list(self.order)


# ---------------------------------------------------------------------------
# Definition matching (shared by Skip / Extend / Fold / extension order)
# ---------------------------------------------------------------------------

class MatchError(Exception):
    pass


def _bind(sigma: dict[Var, Term], taken: set[Var], dv: Term, ct: Term) -> None:
    if not isinstance(dv, Var):
        if dv != ct:
            raise MatchError(f"cannot match {dv} against {ct}")
        return
    if dv in sigma:
        if sigma[dv] != ct:
            raise MatchError(f"{dv} already bound")
        return
    if isinstance(ct, Var):
        if ct in taken:
            raise MatchError(f"target {ct} already used")
        taken.add(ct)
    sigma[dv] = ct


def match_definition(d: Definition, atom: Atom, catas: list[Atom],
                     gen: NameGen, require_all: bool = True
                     ) -> tuple[Subst, set[int]]:
    """Rename d so its program atom equals `atom` and its catamorphism atoms
    cover `catas` (same predicate, same structural argument). Returns the
    renaming and the set of indices of `catas` that found a counterpart.
    Unmatched definition variables go to fresh ones."""
    if d.prog.pred != atom.pred or len(d.prog.args) != len(atom.args):
        raise MatchError("program atom mismatch")
    sigma: dict[Var, Term] = {}
    taken: set[Var] = set()
    for dv, ct in zip(d.prog.args, atom.args):
        _bind(sigma, taken, dv, ct)
    matched_clause: set[int] = set()
    used_def: set[int] = set()
    for i, ca in enumerate(catas):
        found = False
        for j, da in enumerate(d.catas):
            if j in used_def or da.pred != ca.pred:
                continue
            # structural argument must agree under the renaming built so far
            dt = da.args[_adt_pos(da)]
            ct_t = ca.args[_adt_pos(ca)]
            if not isinstance(dt, Var) or sigma.get(dt) != ct_t:
                continue
            trial = dict(sigma)
            trial_taken = set(taken)
            try:
                for dv, cv in zip(da.args, ca.args):
                    _bind(trial, trial_taken, dv, cv)
            except MatchError:
                continue
            sigma, taken = trial, trial_taken
            used_def.add(j)
            matched_clause.add(i)
            found = True
            break
        if not found and require_all:
            raise MatchError(f"no counterpart for {ca}")
    for j, da in enumerate(d.catas):
        if j in used_def:
            continue
        for t in da.args:
            for v in _term_var_order(t):
                if v not in sigma:
                    sigma[v] = gen.fresh_var(v.sort, v.name)
    return Subst(sigma), matched_clause


def _adt_pos(a: Atom) -> int:
    """Position of the single ADT argument of a catamorphism atom."""
    for i, t in enumerate(a.args):
        if term_sort(t).is_adt:
            return i
    raise MatchError(f"{a} has no ADT argument")


# ---------------------------------------------------------------------------
# Transformer
# ---------------------------------------------------------------------------

TRUE_PREFIX = "true_"


def true_pred_name(sort: Sort) -> str:
    return TRUE_PREFIX + sort.name.replace("(", "_").replace(")", "")


@dataclass
class TransformResult:
    clauses: list[Clause]
    new_preds: dict[str, PredDecl]
    definitions: list[Definition]
    iterations: int
    log: DerivationLog


class Transformer:
    def __init__(self, problem: Problem, engine: ConstraintEngine,
                 max_iterations: int = 50) -> None:
        self.problem = problem
        self.engine = engine
        self.max_iterations = max_iterations
        self.specs: dict[str, QuerySpec] = validate_problem(problem)
        self.log = DerivationLog()
        self.pred_gen = 0
        self.var_gen = NameGen("V")
        self.kinds = {n: d.kind for n, d in problem.preds.items()}
        self.decls: dict[str, PredDecl] = dict(problem.preds)
        self.true_clauses: list[Clause] = []
        self.new_decls: dict[str, PredDecl] = {}
        engine.set_sorts(problem.sorts)

    # -- naming ----------------------------------------------------------------

    def fresh_pred(self) -> str:
        self.pred_gen += 1
        return f"new{self.pred_gen}"

    def _kind(self, pred: str) -> str:
        return self.kinds[pred]

    def is_program_kind(self, pred: str) -> bool:
        return self._kind(pred) in (PRED_PROGRAM, PRED_TRUE)

    def is_cata(self, pred: str) -> bool:
        return self._kind(pred) == PRED_CATA

    # -- builtin true_* predicates ----------------------------------------------

    def true_atom(self, t: Term) -> Atom:
        sort = term_sort(t)
        name = true_pred_name(sort)
        if name not in self.decls:
            decl = PredDecl(name, (sort,), PRED_TRUE)
            self.decls[name] = decl
            self.kinds[name] = PRED_TRUE
            self.new_decls[name] = decl
            sd = self.problem.sorts.resolve(sort)
            for c in sd.ctors:
                args = tuple(Var(f"T{i}", s) for i, s in enumerate(c.arg_sorts))
                head = Atom(name, (Ctor(sort, c.name, args),))
                body = tuple(Atom(name, (v,)) for v in args
                             if v.sort == sort)
                self.true_clauses.append(Clause(head, TRUE, body, "builtin"))
        return Atom(name, (t,))

    def definite_clauses(self) -> list[Clause]:
        return self.problem.definite_clauses() + self.true_clauses

    # -- unfolding ---------------------------------------------------------------

    def one_step_unfold(self, c: Clause, atom_index: int,
                        p: list[Clause]) -> list[Clause]:
        if not (0 <= atom_index < len(c.body)):
            raise TransformError("atom to unfold is not in the clause body")
        a = c.body[atom_index]
        out: list[Clause] = []
        for k in p:
            if k.head is None or k.head.pred != a.pred:
                continue
            k2, _ = rename_apart(k, free_vars(c), self.var_gen)
            theta = mgu(a, k2.head)
            if theta is None:
                continue
            resolvent = mk_and(theta.formula(c.constraint),
                               theta.formula(k2.constraint))
            if self.engine.is_satisfiable(resolvent) == UNSAT:
                continue  # unknown is kept, per the conservative policy
            body = tuple(theta.atom(b) for b in c.body[:atom_index]) \
                + tuple(theta.atom(b) for b in k2.body) \
                + tuple(theta.atom(b) for b in c.body[atom_index + 1:])
            head = None if c.head is None else theta.atom(c.head)
            out.append(Clause(head, self.engine.simplify(resolvent), body, "unfold"))
        return out

    def unfold_rule(self, d: Definition) -> list[Clause]:
        p = self.definite_clauses()
        dc = d.clause()
        prog_index = len(d.catas)
        unf = self.one_step_unfold(dc, prog_index, p)
        self.log.add("unfold.step", f"one-step unfold of {d.name} on {d.prog.pred}",
                     [dc], unf)

        # Step 2: drive catamorphism atoms whose ADT argument is a pattern
        guard = sum(_ctor_depth(a.args[_adt_pos(a)])
                    for c in unf for a in c.body if self.is_cata(a.pred)) + 8
        work = list(unf)
        steps = 0
        i = 0
        while i < len(work):
            c = work[i]
            target = None
            for j, a in enumerate(c.body):
                if self.is_cata(a.pred) and \
                        not isinstance(a.args[_adt_pos(a)], Var):
                    target = j
                    break
            if target is None:
                i += 1
                continue
            steps += 1
            if steps > guard:
                raise TransformError(
                    "catamorphism unfolding did not reduce the pattern depth "
                    "(non-conformant property clauses?)")
            repl = self.one_step_unfold(c, target, p)
            self.log.add("unfold.drive", f"unfold {c.body[target].pred} on a pattern",
                         [c], repl)
            work[i:i + 1] = repl

        # Step 3: functionality rewriting
        out: list[Clause] = []
        for c in work:
            out.append(self._apply_functionality(c))
        # orphan catamorphisms hang onto a structural true_* atom
        out = [self._attach_orphans(c) for c in out]
        return out

    def _apply_functionality(self, c: Clause) -> Clause:
        body = list(c.body)
        extra: list[Formula] = []
        changed = True
        while changed:
            changed = False
            for i in range(len(body)):
                if not self.is_cata(body[i].pred):
                    continue
                di = self.decls[body[i].pred]
                xi, ti, yi = io_split(body[i], di)
                for j in range(i + 1, len(body)):
                    if body[j].pred != body[i].pred:
                        continue
                    xj, tj, yj = io_split(body[j], di)
                    if xi == xj and ti == tj:
                        for a, b in zip(yi, yj):
                            extra.append(eq_of(a, b, term_sort(a)))
                        del body[j]
                        changed = True
                        break
                if changed:
                    break
        if not extra:
            return c
        new = Clause(c.head, mk_and(mk_and(*extra), c.constraint),
                     tuple(body), c.origin)
        self.log.add("unfold.merge", "functionality rewrite", [c], [new])
        return new

    def _attach_orphans(self, c: Clause) -> Clause:
        covered: set[Var] = set()
        for a in c.body:
            if self.is_program_kind(a.pred):
                covered |= free_vars(a, "adt")
        orphan_ts: list[Var] = []
        for a in c.body:
            if self.is_cata(a.pred):
                t = a.args[_adt_pos(a)]
                if isinstance(t, Var) and t not in covered \
                        and t not in orphan_ts:
                    orphan_ts.append(t)
        if not orphan_ts:
            return c
        body = tuple(c.body) + tuple(self.true_atom(t) for t in orphan_ts)
        new = Clause(c.head, c.constraint, body, c.origin)
        self.log.add("unfold.carrier", "attach structural true atoms for orphan "
                     "catamorphisms", [c], [new])
        return new

    # -- query-based strengthening -------------------------------------------------

    def strengthen_clause(self, c: Clause) -> Clause:
        assert not c.is_query, "queries are never strengthened"
        body = list(c.body)
        constraint = c.constraint
        # snapshot: strengthening only ever inserts catamorphism atoms, so the
        # program atoms and their left-to-right order are stable
        prog_atoms = [(i, a) for i, a in enumerate(body)
                      if self._kind(a.pred) == PRED_PROGRAM]
        for _, a in prog_atoms:
            spec = self.specs.get(a.pred)
            if spec is None:
                continue
            res = self._strengthen_one(body, a, spec)
            if res is None:
                continue
            added, negc = res
            pos = body.index(a)
            body[pos:pos] = added
            constraint = mk_and(constraint, negc)
        if tuple(body) == c.body and constraint == c.constraint:
            return c
        new = Clause(c.head, constraint, tuple(body), "strengthen")
        self.log.add("strengthen", "query-based strengthening", [c], [new])
        return new

    def _strengthen_one(self, body: list[Atom], a: Atom, spec: QuerySpec
                        ) -> tuple[list[Atom], Formula] | None:
        if not all(isinstance(t, Var) for t in a.args) or \
                len(set(a.args)) != len(a.args):
            self.log.add("strengthen.skip", f"{a.pred}: atom arguments prevent "
                         "renaming the query")
            return None
        catas_k = [b for b in body if self.is_cata(b.pred)
                   and free_vars(b, "adt") & free_vars(a, "adt")]
        rho: dict[Var, Term] = dict(zip(spec.program_atom.args, a.args))
        b2: list[Atom] = []
        for qa, xs, t, ys in spec.cata_atoms:
            t_img = rho[t]
            partner = None
            for cb in catas_k:
                if cb.pred == qa.pred and cb.args[_adt_pos(cb)] == t_img:
                    partner = cb
                    break
            if partner is not None:
                trial = dict(rho)
                try:
                    taken = set(v for v in trial.values() if isinstance(v, Var))
                    for dv, cv in zip(qa.args, partner.args):
                        _bind(trial, taken, dv, cv)
                except MatchError:
                    self.log.add("strengthen.skip", f"{a.pred}: {qa.pred} matches by "
                                 "structure but not as a variant; query unused")
                    return None
                rho = trial
            else:
                for y in ys:
                    rho[y] = self.var_gen.fresh_var(y.sort, y.name)
                for x in xs:
                    if x not in rho:
                        rho[x] = self.var_gen.fresh_var(x.sort, x.name)
                b2.append(qa)
        s = Subst(rho)
        negc = s.formula(mk_not(spec.constraint))
        return [s.atom(qa) for qa in b2], negc

    # -- folding -------------------------------------------------------------------

    def fold_clause(self, c: Clause, defs: DefinitionSet) -> Clause:
        groups: list[tuple[Atom, list[Atom]]] = []
        consumed: set[int] = set()
        catas = [(i, b) for i, b in enumerate(c.body) if self.is_cata(b.pred)]
        for b in c.body:
            if not self.is_program_kind(b.pred):
                continue
            adt = free_vars(b, "adt")
            group = [ca for i, ca in catas if free_vars(ca, "adt") & adt]
            for i, ca in catas:
                if free_vars(ca, "adt") & adt:
                    consumed.add(i)
            groups.append((b, group))
        if len(consumed) != len(catas):
            raise TransformError(
                "internal: catamorphism atom attached to no program atom")

        heads: list[Atom] = []
        for a, group in groups:
            d = defs.lookup(a.pred, cata_sig(group),
                            self._kind(a.pred) == PRED_TRUE)
            if d is None:
                raise TransformError(
                    f"no definition available to fold {a.pred} "
                    f"(define phase bug)")
            if variant_of(d.clause(), c):
                raise TransformError("folding a clause using itself")
            try:
                sigma, _ = match_definition(d, a, group, self.var_gen)
            except MatchError as e:
                raise TransformError(f"fold match failed for {a.pred}: {e}")
            ent = self.engine.entails(c.constraint, sigma.formula(d.constraint))
            if ent != HOLDS:
                raise TransformError(
                    f"fold blocked: constraint entailment {ent} for {d.name}")
            heads.append(sigma.atom(d.head))
        new = Clause(c.head, c.constraint, tuple(heads), "fold")
        self.log.add("fold", f"fold with {', '.join(h.pred for h in heads) or 'nothing'}",
                     [c], [new])
        return new

    # -- Define --------------------------------------------------------------------

    def define_fn(self, cls: list[Clause], defs: DefinitionSet) -> bool:
        """Extend defs so every clause in cls can be folded; returns whether
        anything actually changed (Project or a proper Extend)."""
        changed = False
        for c in cls:
            for a in c.body:
                if not self.is_program_kind(a.pred):
                    continue
                adt = free_vars(a, "adt")
                group = [b for b in c.body if self.is_cata(b.pred)
                         and free_vars(b, "adt") & adt]
                is_true = self._kind(a.pred) == PRED_TRUE
                existing = defs.lookup(a.pred, cata_sig(group), is_true)
                if existing is not None:
                    if self._skip_or_extend(c, a, group, existing, defs, is_true):
                        changed = True
                else:
                    self._project(c, a, group, defs, is_true)
                    changed = True
        return changed

    def _skip_or_extend(self, c: Clause, a: Atom, group: list[Atom],
                        d: Definition, defs: DefinitionSet,
                        is_true: bool) -> bool:
        try:
            sigma, matched = match_definition(d, a, group, self.var_gen,
                                              require_all=True)
            if self.engine.entails(c.constraint,
                                   sigma.formula(d.constraint)) == HOLDS:
                return False  # Skip
            full_match = True
        except MatchError:
            try:
                sigma, matched = match_definition(d, a, group, self.var_gen,
                                                  require_all=False)
            except MatchError as e:
                raise TransformError(
                    f"definition for {a.pred} cannot be matched: {e}")
            full_match = False

        # Extend
        d_constraint = sigma.formula(d.constraint)
        widened = self.engine.generalize(d_constraint, c.constraint)
        b_prime = [sigma.atom(b) for b in d.catas] + \
            [ca for i, ca in enumerate(group) if i not in matched]
        if full_match and self.engine.equivalent(widened, d_constraint):
            return False  # nothing genuinely new; the slot is stable
        new = self._mk_definition(tuple(b_prime), a, widened)
        assert def_extends(d, new, self.engine), \
            "Extend must produce an extension"
        defs.replace(d, new, is_true)
        self.log.add("define.extend", f"{d.name} -> {new.name} for {a.pred}",
                     [d.clause()], [new.clause()])
        return True

    def _project(self, c: Clause, a: Atom, group: list[Atom],
                 defs: DefinitionSet, is_true: bool) -> None:
        inputs: set[Var] = set()
        for ca in group:
            decl = self.decls[ca.pred]
            xs, _, _ = io_split(ca, decl)
            inputs |= {x for x in xs if isinstance(x, Var)}
        projected = self.engine.project(c.constraint, inputs)
        new = self._mk_definition(tuple(group), a, projected)
        defs.add(new, is_true)
        self.log.add("define.project", f"{new.name} for {a.pred}", [c],
                     [new.clause()])

    def _mk_definition(self, catas: tuple[Atom, ...], prog: Atom,
                       constraint: Formula) -> Definition:
        name = self.fresh_pred()
        head_vars = _head_tuple(catas, prog)
        head = Atom(name, head_vars)
        d = Definition(name, head, constraint, catas, prog)
        _check_definition_conditions(d)
        decl = PredDecl(name, tuple(v.sort for v in head_vars), PRED_PROGRAM)
        self.decls[name] = decl
        self.kinds[name] = PRED_PROGRAM
        self.new_decls[name] = decl
        return d

    # -- the definition-set operator and its fixpoint ----------------------------------

    def unfold_all(self, defs: DefinitionSet) -> list[Clause]:
        out: list[Clause] = []
        for d in defs:
            out.extend(self.unfold_rule(d))
        return out

    def strengthen_all(self, cls: list[Clause]) -> list[Clause]:
        return [self.strengthen_clause(c) for c in cls]

    def definition_step(self, defs: DefinitionSet) -> bool:
        """One unfold-strengthen-define round; True if the set grew."""
        if len(defs) == 0:
            return self.define_fn(self.problem.queries, defs)
        cls = self.strengthen_all(self.unfold_all(defs))
        return self.define_fn(cls, defs)

    def definition_fixpoint(self) -> tuple[DefinitionSet, int]:
        defs = DefinitionSet()
        for i in range(1, self.max_iterations + 1):
            before = defs.snapshot()
            changed = self.definition_step(defs)
            _assert_monotone(before, defs, self.engine)
            if not changed:
                self.log.add("fixpoint", f"stable after {i} iterations")
                return defs, i
        raise TransformError(
            f"definition fixpoint not reached within {self.max_iterations} "
            f"iterations (cap is configurable)")

    # -- the whole algorithm -------------------------------------------------------------

    def transform_all(self) -> TransformResult:
        defs, iterations = self.definition_fixpoint()
        folded_queries = [self.fold_clause(q, defs) for q in self.problem.queries]
        body = self.strengthen_all(self.unfold_all(defs))
        folded = [self.fold_clause(c, defs) for c in body]
        out = folded_queries + folded
        out = [propagate_equalities(c) for c in out]

        # property clauses are fully absorbed unless something still calls them
        referenced: set[str] = set()
        for c in out:
            referenced.update(a.pred for a in c.body)
        leftovers = [c for c in self.problem.properties
                     if c.head and c.head.pred in referenced]
        out.extend(leftovers)
        return TransformResult(out, dict(self.new_decls), defs.snapshot(),
                               iterations, self.log)


# ---------------------------------------------------------------------------
# Definition-order checks
# ---------------------------------------------------------------------------

def _check_definition_conditions(d: Definition) -> None:
    body_vars = free_vars(list(d.catas)) | free_vars(d.prog)
    if set(d.head.args) != body_vars or len(set(d.head.args)) != len(d.head.args):
        raise TransformError(
            f"{d.name}: head must list the body variables once each")
    if not free_vars(d.constraint) <= body_vars:
        raise TransformError(f"{d.name}: constraint uses foreign variables")
    cata_adt = free_vars(list(d.catas), "adt")
    if not cata_adt <= free_vars(d.prog, "adt"):
        raise TransformError(
            f"{d.name}: catamorphism ADT variables outside the program atom")


def def_extends(d1: Definition, d2: Definition,
                engine: ConstraintEngine) -> bool:
    """d1 [= d2: catas of d1 embed into d2's and c1 entails c2."""
    if d1.prog.pred != d2.prog.pred:
        return False
    gen = NameGen("x")
    try:
        sigma, _ = match_definition(d2, d1.prog, list(d1.catas), gen)
    except MatchError:
        return False
    return engine.entails(d1.constraint, sigma.formula(d2.constraint)) == HOLDS


def _assert_monotone(before: list[Definition], after: DefinitionSet,
                     engine: ConstraintEngine) -> None:
    for d1 in before:
        if any(def_extends(d1, d2, engine) for d2 in after):
            continue
        raise TransformError(
            f"iteration broke the extension order at {d1.name}")


def _ctor_depth(t: Term) -> int:
    if isinstance(t, Ctor):
        return 1 + max((_ctor_depth(a) for a in t.args), default=0)
    return 0


# ---------------------------------------------------------------------------
# Output cleanup: substitute top-level var=var conjuncts away
# ---------------------------------------------------------------------------

def propagate_equalities(c: Clause) -> Clause:
    parts = conjuncts(c.constraint)
    pairs: list[tuple[Var, Var]] = []
    rest: list[Formula] = []
    for p in parts:
        pair = _var_eq(p)
        if pair is not None:
            pairs.append(pair)
        else:
            rest.append(p)
    if not pairs:
        return c
    parent: dict[Var, Var] = {}

    def find(v: Var) -> Var:
        while parent.get(v, v) != v:
            parent[v] = parent.get(parent[v], parent[v])
            v = parent[v]
        return v

    order = _occurrence_order(c)
    rank = {v: i for i, v in enumerate(order)}
    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        keep, drop = (ra, rb) if rank.get(ra, 1 << 30) <= rank.get(rb, 1 << 30) \
            else (rb, ra)
        parent[drop] = keep
    mapping = {v: find(v) for v in parent if find(v) != v}
    s = Subst(dict(mapping))
    return Clause(None if c.head is None else s.atom(c.head),
                  mk_and(*(s.formula(f) for f in rest)),
                  tuple(s.atom(a) for a in c.body), c.origin)


def _var_eq(f: Formula) -> tuple[Var, Var] | None:
    if isinstance(f, FComp) and f.rel == "=" and isinstance(f.lhs, Var) \
            and isinstance(f.rhs, Var):
        return f.lhs, f.rhs
    if isinstance(f, FEq) and isinstance(f.lhs, Var) and isinstance(f.rhs, Var):
        return f.lhs, f.rhs
    if isinstance(f, FIff) and isinstance(f.lhs, FVar) and isinstance(f.rhs, FVar):
        return f.lhs.var, f.rhs.var
    return None


def _occurrence_order(c: Clause) -> list[Var]:
    from .syntax import display_renaming
    ren = display_renaming(c)
    pairs = sorted(ren.mapping.items(), key=lambda p: (len(p[1].name), p[1].name))
    return [v for v, _ in pairs]


# ---------------------------------------------------------------------------
# Convenience driver
# ---------------------------------------------------------------------------

def transform_problem(problem: Problem, engine: ConstraintEngine,
                      max_iterations: int = 50) -> TransformResult:
    return Transformer(problem, engine, max_iterations).transform_all()


def transformed_problem(problem: Problem, result: TransformResult) -> Problem:
    """Package a transformation result as a Problem for emission/solving."""
    preds = dict(problem.preds)
    preds.update(result.new_preds)
    out = Problem(problem.sorts, preds, [], [], [])
    for c in result.clauses:
        if c.is_query:
            out.queries.append(c)
        else:
            out.program.append(c)
    return out
