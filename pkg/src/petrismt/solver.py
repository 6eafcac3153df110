"""Running external SMT solvers and reading back their models."""

from __future__ import annotations

import json
import os
import shutil
import signal
import subprocess
import tempfile
import time
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import sexpr
from .encoder import (
    UF_NAME,
    EncodingConfig,
    IntLit,
    SmtScript,
    bv_width,
    place_vars,
    term_to_sexpr,
)
from .errors import MissingVariable, SExprSyntaxError, SpawnFailure, UnparsableModel

SAT, UNSAT, UNKNOWN, TIMEOUT, ERROR = "sat", "unsat", "unknown", "timeout", "error"
SOLVER_PATH_ENV = "SOLVER_PATH"


@dataclass(frozen=True)
class SolverSpec:
    name: str
    command: tuple[str, ...]
    timeout: float = 60.0
    produces_models: bool = False

    def __post_init__(self):
        object.__setattr__(self, "command", tuple(self.command))
        if sum(arg.count("{file}") for arg in self.command) != 1:
            raise ValueError(f"solver {self.name}: command must contain {{file}} exactly once")
        if self.timeout <= 0:
            raise ValueError(f"solver {self.name}: timeout must be positive")

    def argv(self, path) -> list[str]:
        return [arg.replace("{file}", str(path)) for arg in self.command]


@dataclass(frozen=True)
class SolverRun:
    solver: str
    status: str
    wall_time: float
    raw_model: str | None = None
    path: str | None = None


def load_solver_config(path) -> list[SolverSpec]:
    """Read a JSON solver list.

    Either a bare list or ``{"solvers": [...]}``; each entry has ``name``,
    ``command`` (argv with one ``{file}``), ``timeout`` (seconds) and
    ``produces_models``.
    """
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict):
        data = data["solvers"]
    return [
        SolverSpec(
            name=entry["name"],
            command=tuple(entry["command"]),
            timeout=float(entry.get("timeout", 60)),
            produces_models=bool(entry.get("produces_models", False)),
        )
        for entry in data
    ]


def resolve_executable(name: str) -> str:
    search = os.environ.get(SOLVER_PATH_ENV)
    path = os.environ.get("PATH", os.defpath)
    if search:
        path = search + os.pathsep + path
    found = shutil.which(name, path=path)
    if found is None:
        raise SpawnFailure(f"solver executable {name!r} not found")
    return found


def _with_get_model(text: str) -> str:
    body = text.rstrip()
    if body.endswith("(exit)"):
        body = body[: -len("(exit)")].rstrip()
    return "(set-option :produce-models true)\n" + body + "\n(get-model)\n(exit)\n"


def run_solver(spec: SolverSpec, path, grace: float = 1.0) -> SolverRun:
    """Run one solver on one file, mapping its first output token to a status.

    Time is wall-clock around the child process. A run that outlives
    `spec.timeout` has its whole process group killed and is reported as
    TIMEOUT; a nonzero exit without a verdict is ERROR.
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    target, tmp = path, None
    if spec.produces_models:
        fd, tmp = tempfile.mkstemp(suffix=".smt2")
        with os.fdopen(fd, "w") as fh:
            fh.write(_with_get_model(path.read_text()))
        target = Path(tmp)
    argv = spec.argv(target)
    argv[0] = resolve_executable(argv[0])
    try:
        start = time.perf_counter()
        try:
            proc = subprocess.Popen(
                argv,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                start_new_session=True,
            )
        except OSError as exc:
            raise SpawnFailure(f"cannot start {argv[0]}: {exc}") from exc
        try:
            out, _ = proc.communicate(timeout=spec.timeout)
        except subprocess.TimeoutExpired:
            _kill_group(proc)
            proc.communicate(timeout=grace)
            return SolverRun(spec.name, TIMEOUT, time.perf_counter() - start, None, str(path))
        wall = time.perf_counter() - start
    finally:
        if tmp is not None:
            os.unlink(tmp)

    first, _, rest = out.lstrip().partition("\n")
    token = first.split()[0] if first.split() else ""
    if token in (SAT, UNSAT, UNKNOWN):
        status = token
    else:
        status = ERROR
    model = rest if status == SAT and spec.produces_models else None
    return SolverRun(spec.name, status, wall, model, str(path))


def _kill_group(proc):
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except ProcessLookupError:
        pass


def run_many(
    specs: Sequence[SolverSpec], paths: Sequence, jobs: int = 1
) -> list[SolverRun]:
    """Every solver on every file, with at most `jobs` concurrent children."""
    tasks = [(s, p) for p in paths for s in specs]
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        return list(pool.map(lambda sp: run_solver(*sp), tasks))


# -- models --------------------------------------------------------------


def _literal(e):
    """Python value of a model literal: int for bitvectors/integers, str for constructors."""
    if isinstance(e, str):
        if e.startswith("#b"):
            return int(e[2:], 2)
        if e.startswith("#x"):
            return int(e[2:], 16)
        if e.isdigit():
            return int(e)
        if e in ("true", "false"):
            return e == "true"
        return e
    if len(e) == 2 and e[0] == "-":
        return -_literal(e[1])
    if len(e) == 3 and e[0] == "as" and isinstance(e[1], str):
        return _literal(e[1])
    if len(e) == 3 and e[0] == "_" and isinstance(e[1], str) and e[1].startswith("bv"):
        return int(e[1][2:])
    raise UnparsableModel(f"unsupported model value {sexpr.dumps(e)}")


def _eval_body(e, env):
    if isinstance(e, str) and e in env:
        return env[e]
    if isinstance(e, list) and e and isinstance(e[0], str):
        head, args = e[0], e[1:]
        if head == "ite" and len(args) == 3:
            return _eval_body(args[1] if _eval_body(args[0], env) else args[2], env)
        if head == "=" and len(args) >= 2:
            vals = [_eval_body(a, env) for a in args]
            return all(v == vals[0] for v in vals)
        if head == "or":
            return any(_eval_body(a, env) for a in args)
        if head == "and":
            return all(_eval_body(a, env) for a in args)
        if head == "not" and len(args) == 1:
            return not _eval_body(args[0], env)
        if head == "let" and len(args) == 2:
            inner = dict(env)
            for name, value in args[0]:
                inner[name] = _eval_body(value, env)
            return _eval_body(args[1], inner)
        if head == "as" and len(args) == 2 and isinstance(args[0], list):
            raise UnparsableModel("as-const model values are not supported")
    return _literal(e)


def _define_funs(raw: str):
    try:
        exprs = sexpr.parse_all(raw)
    except SExprSyntaxError as exc:
        raise UnparsableModel(str(exc)) from exc
    # Accept a bare "sat" line and either a wrapping list or a (model ...) form.
    exprs = [e for e in exprs if e not in ("sat", "unsat", "unknown")]
    if len(exprs) == 1 and isinstance(exprs[0], list):
        inner = exprs[0]
        if inner[:1] == ["model"]:
            exprs = inner[1:]
        elif all(isinstance(x, list) for x in inner):
            exprs = inner
    funs = {}
    for e in exprs:
        if not (isinstance(e, list) and len(e) == 5 and e[0] == "define-fun"):
            if isinstance(e, list) and e and e[0] in ("declare-fun", "declare-datatypes", "declare-sort"):
                continue
            raise UnparsableModel(f"unexpected model entry {sexpr.dumps(e)[:80]}")
        _, name, params, _result, body = e
        funs[name] = ([p[0] for p in params], body)
    return funs


def parse_model(raw: str, cfg: EncodingConfig, script: SmtScript, places: Sequence[str], num: Mapping[str, int]) -> dict[str, object]:
    """Per-place values from a ``get-model`` response.

    Keys are the place-variable names (``b_pK``/``x_pK``) for fragments
    without a function, and the place identifiers for the others, where the
    function definition is evaluated at each place's argument. Values are
    ints for bitvectors and integers, constructor names for datatypes.
    """
    funs = _define_funs(raw)
    declared = {name for name, _ in script.constants}
    pv = place_vars(places, num, cfg)
    out: dict[str, object] = {}
    if not cfg.uses_uf:
        for p in places:
            name = pv.terms[p].name
            if name not in declared:
                raise MissingVariable(f"{name} is not declared in the script")
            if name not in funs:
                raise MissingVariable(f"model has no value for {name}")
            params, body = funs[name]
            if params:
                raise UnparsableModel(f"{name} defined with parameters")
            out[name] = _eval_body(body, {})
        return out
    if UF_NAME not in funs:
        raise MissingVariable(f"model has no definition of {UF_NAME}")
    params, body = funs[UF_NAME]
    if len(params) != 1:
        raise UnparsableModel(f"{UF_NAME} defined with {len(params)} parameters")
    for p in places:
        out[p] = _eval_body(body, {params[0]: pv.keys[p]})
    return out


def format_model(values: Mapping[str, object], cfg: EncodingConfig, script: SmtScript, places: Sequence[str], num: Mapping[str, int]) -> str:
    """Render per-place values as a solver would (inverse of `parse_model`)."""
    pv = place_vars(places, num, cfg)
    n = cfg.num_units

    def lit(v):
        if cfg.theory == "BV":
            return "#b" + format(v, f"0{n}b")
        if cfg.theory == "DT":
            return v
        return sexpr.dumps(term_to_sexpr_int(v))

    lines = ["("]
    if not cfg.uses_uf:
        sort = dict(script.constants)
        for p in places:
            name = pv.terms[p].name
            lines.append(f"  (define-fun {name} () {sort[name]} {lit(values[name])})")
    else:
        _, (arg_sort,), result = script.functions[0]
        order = list(places)
        w = bv_width(arg_sort)

        def key(p):
            k = pv.keys[p]
            if w is not None:
                return "#b" + format(k, f"0{w}b")
            if isinstance(k, int):
                return sexpr.dumps(term_to_sexpr_int(k))
            return k

        body = lit(values[order[-1]])
        for p in reversed(order[:-1]):
            body = f"(ite (= x!0 {key(p)}) {lit(values[p])} {body})"
        lines.append(f"  (define-fun {UF_NAME} ((x!0 {arg_sort})) {result} {body})")
    lines.append(")")
    return "\n".join(lines) + "\n"


def term_to_sexpr_int(v: int):
    return term_to_sexpr(IntLit(v))
