"""Constraint engine: satisfiability, entailment, projection, widening.

Sat/entailment queries go to an external SMT oracle, a child process
speaking SMT-LIB 2 over stdin/stdout (push/pop per query). The oracle
command is configurable; the default resolution order is

  1. the CHC_ORACLE environment variable (shell-split),
  2. a z3 binary on PATH (`z3 -in`),
  3. the bundled reference oracle (`python -m catafuse.refsolver.oracle`).

Verdicts are three-valued and the transformer treats unknown conservatively
(see the callers): never drop a clause or merge definitions without proof.
"""

from __future__ import annotations

import os
import shlex
import shutil
import subprocess
import sys
import threading
import time

from .smtlib import datatype_block, mangle_sort, smt_formula
from .syntax import (
    FAnd, FComp, FEq, FFalse, FIff, FImp, FIte, FNot, FOr, FTrue, FVar,
    Formula, IntConst, SortTable, TRUE, FALSE, Var, conjuncts,
    display_renaming, free_vars, lin, mk_and, mk_not, mk_or,
)

SAT = "sat"
UNSAT = "unsat"
UNKNOWN = "unknown"

HOLDS = "holds"
FAILS = "fails"


class OracleError(Exception):
    """The external oracle is unreachable or broke protocol."""


def default_oracle_cmd() -> list[str]:
    env = os.environ.get("CHC_ORACLE")
    if env:
        return shlex.split(env)
    z3 = shutil.which("z3")
    if z3:
        return [z3, "-in"]
    return [sys.executable, "-m", "catafuse.refsolver.oracle"]


class Oracle:
    """One child solver process; push/pop per query; thread-safe via a lock."""

    def __init__(self, cmd: list[str] | None = None,
                 timeout_ms: int = 5000) -> None:
        self.cmd = cmd or default_oracle_cmd()
        self.timeout_ms = timeout_ms
        self.proc: subprocess.Popen | None = None
        self.lock = threading.Lock()
        self._decls: list[str] = []

    def _start(self) -> None:
        try:
            self.proc = subprocess.Popen(
                self.cmd, stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL, text=True, bufsize=1)
        except OSError as e:
            raise OracleError(f"cannot launch oracle {self.cmd}: {e}") from e
        self._send("(set-option :print-success false)")
        self._send("(set-logic ALL)")
        for line in self._decls:
            self._send(line)

    def set_datatypes(self, sorts: SortTable) -> None:
        decls = datatype_block(sorts)
        if decls != self._decls:
            self._decls = decls
            if self.proc is not None:
                self._send("(reset)")
                self._send("(set-option :print-success false)")
                self._send("(set-logic ALL)")
                for line in self._decls:
                    self._send(line)

    def _send(self, line: str) -> None:
        assert self.proc is not None and self.proc.stdin is not None
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as e:
            raise OracleError(f"oracle pipe broken: {e}") from e

    def _read_verdict(self, deadline: float) -> str:
        assert self.proc is not None and self.proc.stdout is not None
        import select
        while True:
            if self.proc.poll() is not None:
                raise OracleError("oracle process exited")
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise OracleError("oracle did not answer within the deadline")
            ready, _, _ = select.select([self.proc.stdout], [], [],
                                        min(remaining, 0.5))
            if not ready:
                continue
            line = self.proc.stdout.readline()
            if not line:
                raise OracleError("oracle closed stdout")
            line = line.strip()
            if line in (SAT, UNSAT, UNKNOWN):
                return line
            if line.startswith("(error"):
                return UNKNOWN

    def check(self, formula: Formula, timeout_ms: int | None = None) -> str:
        timeout = timeout_ms or self.timeout_ms
        with self.lock:
            for attempt in (0, 1):
                if self.proc is None or self.proc.poll() is not None:
                    self._start()
                try:
                    return self._query(formula, timeout)
                except OracleError:
                    self._kill()
                    if attempt:
                        raise
        raise OracleError("unreachable")

    def _query(self, formula: Formula, timeout: int) -> str:
        f = display_renaming(_as_clause(formula)).formula(formula)
        self._send("(push 1)")
        self._send(f"(set-option :timeout {timeout})")
        for v in sorted(free_vars(f), key=lambda v: (len(v.name), v.name)):
            self._send(f"(declare-const {v.name} {mangle_sort(v.sort)})")
        self._send(f"(assert {smt_formula(f)})")
        self._send("(check-sat)")
        verdict = self._read_verdict(time.monotonic() + timeout / 1000 + 10)
        self._send("(pop 1)")
        return verdict

    def _kill(self) -> None:
        if self.proc is not None:
            try:
                self.proc.kill()
            except OSError:
                pass
            self.proc = None

    def close(self) -> None:
        with self.lock:
            if self.proc is not None and self.proc.poll() is None:
                try:
                    self._send("(exit)")
                except OracleError:
                    pass
            self._kill()

    def __del__(self) -> None:
        try:
            self.close()
        except Exception:
            pass


def _as_clause(f: Formula):
    from .syntax import Clause
    return Clause(None, f, ())


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

_ATOMIC_OK = (FComp, FVar, FEq)


def is_atomic_conjunct(f: Formula) -> bool:
    """The granularity at which widening keeps or drops."""
    if isinstance(f, _ATOMIC_OK):
        return True
    if isinstance(f, FNot):
        return isinstance(f.arg, FVar)
    if isinstance(f, FIff):
        return is_atomic_conjunct(f.lhs) and is_atomic_conjunct(f.rhs)
    return False


class ConstraintEngine:
    def __init__(self, oracle: Oracle | None = None,
                 timeout_ms: int = 5000) -> None:
        self.oracle = oracle or Oracle(timeout_ms=timeout_ms)
        self._sat_cache: dict[Formula, str] = {}
        self._ent_cache: dict[tuple[Formula, Formula], str] = {}

    def set_sorts(self, sorts: SortTable) -> None:
        self.oracle.set_datatypes(sorts)

    def close(self) -> None:
        self.oracle.close()

    # -- satisfiability -------------------------------------------------------

    def is_satisfiable(self, c: Formula, timeout_ms: int | None = None) -> str:
        c = self.simplify(c)
        if isinstance(c, FTrue):
            return SAT
        if isinstance(c, FFalse):
            return UNSAT
        hit = self._sat_cache.get(c)
        if hit is not None:
            return hit
        v = self.oracle.check(c, timeout_ms)
        if v != UNKNOWN:
            self._sat_cache[c] = v
        return v

    def entails(self, c: Formula, d: Formula) -> str:
        """holds iff c & ~d is unsat; fails iff satisfiable; else unknown."""
        c = self.simplify(c)
        d = self.simplify(d)
        if isinstance(d, FTrue) or isinstance(c, FFalse) or c == d:
            return HOLDS
        key = (c, d)
        hit = self._ent_cache.get(key)
        if hit is not None:
            return hit
        v = self.oracle.check(mk_and(c, mk_not(d)))
        out = HOLDS if v == UNSAT else FAILS if v == SAT else UNKNOWN
        if out != UNKNOWN:
            self._ent_cache[key] = out
        return out

    def equivalent(self, c: Formula, d: Formula) -> bool:
        return self.entails(c, d) == HOLDS and self.entails(d, c) == HOLDS

    # -- simplification -------------------------------------------------------

    def simplify(self, f: Formula) -> Formula:
        return simplify(f)

    # -- generalization (widening) --------------------------------------------

    def generalize(self, d: Formula, c: Formula) -> Formula:
        """Widen d against c: keep exactly d's atomic conjuncts entailed by c."""
        d = self.simplify(d)
        parts = conjuncts(d)
        if not all(is_atomic_conjunct(p) for p in parts):
            return TRUE
        kept = [p for p in parts if self.entails(c, p) == HOLDS]
        return mk_and(*kept)

    # -- projection ------------------------------------------------------------

    def project(self, c: Formula, keep: set[Var]) -> Formula:
        c = self.simplify(c)
        if isinstance(c, (FTrue, FFalse)):
            return c
        if free_vars(c) <= keep:
            return c
        if self.is_satisfiable(c) == UNSAT:
            return FALSE
        parts = conjuncts(c)
        atomic = [p for p in parts if is_atomic_conjunct(p)]
        result = _fm_project(atomic, keep)
        if self.entails(c, result) == HOLDS:
            return result
        # fall back: drop every conjunct that mentions an eliminated variable
        kept = [p for p in atomic if free_vars(p) <= keep]
        result = mk_and(*kept)
        if self.entails(c, result) == HOLDS:
            return result
        return TRUE


def simplify(f: Formula) -> Formula:
    """Logically equivalent cleanup: unit elimination, flattening, double negation."""
    if isinstance(f, (FTrue, FFalse, FVar, FComp, FEq)):
        if isinstance(f, FComp) and isinstance(f.lhs, IntConst) \
                and isinstance(f.rhs, IntConst):
            ok = {"=": f.lhs.value == f.rhs.value,
                  "<": f.lhs.value < f.rhs.value,
                  "=<": f.lhs.value <= f.rhs.value,
                  ">=": f.lhs.value >= f.rhs.value,
                  ">": f.lhs.value > f.rhs.value}[f.rel]
            return TRUE if ok else FALSE
        if isinstance(f, FEq) and f.lhs == f.rhs:
            return TRUE
        return f
    if isinstance(f, FNot):
        a = simplify(f.arg)
        return mk_not(a)
    if isinstance(f, FAnd):
        return mk_and(*(simplify(a) for a in f.args))
    if isinstance(f, FOr):
        return mk_or(*(simplify(a) for a in f.args))
    if isinstance(f, FImp):
        lhs, rhs = simplify(f.lhs), simplify(f.rhs)
        if isinstance(lhs, FTrue):
            return rhs
        if isinstance(lhs, FFalse) or isinstance(rhs, FTrue):
            return TRUE
        if isinstance(rhs, FFalse):
            return mk_not(lhs)
        return FImp(lhs, rhs)
    if isinstance(f, FIff):
        lhs, rhs = simplify(f.lhs), simplify(f.rhs)
        if isinstance(lhs, FTrue):
            return rhs
        if isinstance(rhs, FTrue):
            return lhs
        if isinstance(lhs, FFalse):
            return mk_not(rhs)
        if isinstance(rhs, FFalse):
            return mk_not(lhs)
        if lhs == rhs:
            return TRUE
        return FIff(lhs, rhs)
    if isinstance(f, FIte):
        c, a, b = simplify(f.cond), simplify(f.then), simplify(f.els)
        if isinstance(c, FTrue):
            return a
        if isinstance(c, FFalse):
            return b
        return FIte(c, a, b)
    raise TypeError(f"unknown formula {f!r}")


def _fm_project(atomic: list[Formula], keep: set[Var]) -> Formula:
    """Fourier-Motzkin over the arithmetic conjuncts; other conjuncts survive
    only when they already live inside `keep`. Always an over-approximation."""
    lias: list[tuple[dict[Var, int], int, str]] = []  # sum c + k (rel) 0
    others: list[Formula] = []
    for p in atomic:
        if isinstance(p, FComp):
            try:
                from .syntax import as_lin, lin_sub
                d = lin_sub(p.lhs, p.rhs)
                cs, k = as_lin(d)
            except TypeError:
                others.append(p)
                continue
            if p.rel == "=":
                lias.append((dict(cs), k, "="))
            elif p.rel == "=<":
                lias.append((dict(cs), k, "<="))
            elif p.rel == "<":
                lias.append((dict(cs), k + 1, "<="))
            elif p.rel == ">=":
                lias.append(({v: -a for v, a in cs.items()}, -k, "<="))
            else:  # >
                lias.append(({v: -a for v, a in cs.items()}, -k + 1, "<="))
        else:
            others.append(p)
    kept_others = [p for p in others if free_vars(p) <= keep]

    rows = []
    for cs, k, rel in lias:
        if rel == "=":
            rows.append((dict(cs), k, True))
        else:
            rows.append((dict(cs), k, False))
    drop = sorted({v for cs, _, _ in rows for v in cs} - keep,
                  key=lambda v: v.name)
    for x in drop:
        eqs = [(cs, k) for cs, k, is_eq in rows if is_eq and cs.get(x, 0) != 0]
        solved = False
        for cs, k in eqs:
            a = cs[x]
            if abs(a) == 1:
                sub_c = {v: -b * a for v, b in cs.items() if v != x}
                sub_k = -k * a
                nxt = []
                for cs2, k2, is_eq2 in rows:
                    if (cs2, k2) == (cs, k) and is_eq2:
                        continue
                    b = cs2.get(x, 0)
                    if b == 0:
                        nxt.append((cs2, k2, is_eq2))
                        continue
                    nc = {v: a2 for v, a2 in cs2.items() if v != x}
                    for v, a2 in sub_c.items():
                        nc[v] = nc.get(v, 0) + b * a2
                        if nc[v] == 0:
                            del nc[v]
                    nxt.append((nc, k2 + b * sub_k, is_eq2))
                rows = nxt
                solved = True
                break
        if solved:
            continue
        ineqs = []
        for cs, k, is_eq in rows:
            if cs.get(x, 0) == 0:
                ineqs.append((cs, k, is_eq))
                continue
            if is_eq:
                ineqs.append((dict(cs), k, False))
                ineqs.append(({v: -a for v, a in cs.items()}, -k, False))
            else:
                ineqs.append((cs, k, False))
        lows = [(cs, k) for cs, k, _ in ineqs if cs.get(x, 0) < 0]
        highs = [(cs, k) for cs, k, _ in ineqs if cs.get(x, 0) > 0]
        rows = [(cs, k, is_eq) for cs, k, is_eq in ineqs if cs.get(x, 0) == 0]
        for cl, kl in lows:
            al = -cl[x]
            for ch, kh in highs:
                ah = ch[x]
                comb: dict[Var, int] = {}
                for v, a in cl.items():
                    if v != x:
                        comb[v] = comb.get(v, 0) + ah * a
                for v, a in ch.items():
                    if v != x:
                        comb[v] = comb.get(v, 0) + al * a
                comb = {v: a for v, a in comb.items() if a != 0}
                rows.append((comb, ah * kl + al * kh, False))
        if len(rows) > 600:
            return mk_and(*kept_others)  # caller re-checks and falls back

    out: list[Formula] = list(kept_others)
    for cs, k, is_eq in rows:
        if not cs:
            continue
        t = lin(cs, k)
        out.append(FComp("=" if is_eq else "=<", t, IntConst(0)))
    return simplify(mk_and(*out))
