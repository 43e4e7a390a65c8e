"""Problem files and engine dispatch for the command-line front end.

A problem file is a JSON document::

    {
      "frame": ["pq", "p~q", "~pq", "~p~q"],
      "prior": {"type": "mass", "entries": [{"set": ["pq", "p~q"], "value": 0.8},
                                             {"set": ["pq", "p~q", "~pq", "~p~q"], "value": 0.2}]},
      "rules": [{"then": ["pq", "~pq"], "given": ["pq", "p~q"], "lower": 0.9}],
      "engine": "all",
      "options": {"exact": false}
    }

Reports are plain dicts serialised with a fixed key order and numbers rounded
to 12 significant digits, so identical inputs give byte-identical output.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Union

import jsonschema
from jsonschema.exceptions import best_match

from . import __version__
from ._dense import TOL
from .belief import conditionalize_mass, refine_partition
from .errors import (
    CertainComplement,
    EmptyAntecedent,
    EmptyInterval,
    EmptyPolytope,
    FrameError,
    FrameTooLarge,
    Inconsistent,
    InconsistentRule,
    InvalidBound,
    InvalidMass,
    InvalidSupport,
    NegativeMass,
    NotABeliefFunction,
    ParseError,
    UnknownAtom,
    ValidationError,
)
from .evidence import (
    BELIEF,
    KINDS,
    RAW,
    MassFunction,
    SupportFunction,
    belief_from_mass,
    mass_from_belief,
)
from .interval import (
    ConsistencyReport,
    check_bayes,
    check_general,
    check_optimistic,
    refine_bayes,
    refine_optimistic,
    refine_optimistic_closed,
)
from .lattice import PARTITION_CAP, Frame, PropSet
from .oracle import build_polytope, check_consistency_definition, min_prob
from .rules import Rule, RuleBase, make_rulebase

ENGINES = ("bayes", "optimistic", "general-check", "partition", "mass", "oracle")
# engines whose refined lower bounds enter the comparison table
COMPARED = ("bayes", "optimistic", "partition", "mass")
SOUNDNESS_TOL = 1e-9

EXIT_OK, EXIT_INCONSISTENT, EXIT_INPUT = 0, 1, 2

# engine failures that signal contradictory evidence rather than bad input
RUNTIME_ERRORS = (Inconsistent, EmptyPolytope, NegativeMass, EmptyInterval, CertainComplement)
INPUT_ERRORS = (NotABeliefFunction, InvalidSupport, FrameTooLarge)

_SUBSET = {"type": "array", "items": {"type": "string"}, "uniqueItems": True}

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "evkernel problem",
    "type": "object",
    "required": ["frame", "prior"],
    "additionalProperties": False,
    "properties": {
        "frame": {"type": "array", "items": {"type": "string", "minLength": 1},
                  "minItems": 1},
        "prior": {
            "type": "object",
            "required": ["type", "entries"],
            "additionalProperties": False,
            "properties": {
                "type": {"enum": ["mass", "bounds"]},
                "kind": {"enum": list(KINDS)},
                "entries": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["set", "value"],
                        "additionalProperties": False,
                        "properties": {"set": _SUBSET, "value": {"type": "number"}},
                    },
                },
            },
        },
        "rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["then", "given", "lower"],
                "additionalProperties": False,
                "properties": {
                    "then": _SUBSET,
                    "given": _SUBSET,
                    "lower": {"type": "number"},
                    "unconditional": {"type": "boolean"},
                },
            },
        },
        "engine": {"enum": list(ENGINES) + ["all"]},
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "max_sweeps": {"type": "integer", "minimum": 1},
                "exact": {"type": "boolean"},
                "closure": {"type": "boolean"},
                "partition_cap": {"type": "integer", "minimum": 1},
                "iterate_partition": {"type": "boolean"},
            },
        },
    },
}


@dataclass(frozen=True)
class Options:
    tol: float = TOL
    max_sweeps: Optional[int] = None
    exact: bool = False
    closure: bool = False
    partition_cap: int = PARTITION_CAP
    iterate_partition: bool = False


@dataclass(frozen=True)
class Problem:
    frame: Frame
    prior: Union[MassFunction, SupportFunction]
    rules: RuleBase
    engine: str = "all"
    options: Options = field(default_factory=Options)

    @property
    def support(self) -> SupportFunction:
        if isinstance(self.prior, MassFunction):
            return belief_from_mass(self.prior)
        return self.prior

    def mass(self) -> MassFunction:
        """The prior as a mass function; raises if the bounds are not a belief."""
        if isinstance(self.prior, MassFunction):
            return self.prior
        return mass_from_belief(self.prior)

    def belief(self) -> SupportFunction:
        """The prior as a belief-kind support function."""
        if isinstance(self.prior, MassFunction):
            return belief_from_mass(self.prior)
        if self.prior.kind == BELIEF:
            return self.prior
        return SupportFunction(self.frame, self.prior.values, BELIEF)

    def with_options(self, **changes) -> Problem:
        return replace(self, options=replace(self.options, **changes))


@dataclass
class Report:
    data: dict
    exit_code: int = EXIT_OK

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, ensure_ascii=False) + "\n"

    def table(self) -> str:
        return render_table(self.data)


# -- parsing -----------------------------------------------------------------

def _field_path(path) -> str:
    out = ""
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out or "<root>"


def parse_problem(path) -> Problem:
    """Read and validate a problem file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_problem_text(text)


def parse_problem_text(text: str) -> Problem:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return load_problem(data)


def load_problem(data: Any) -> Problem:
    """Validate an already decoded problem document."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    err = best_match(validator.iter_errors(data))
    if err is not None:
        where = _field_path(err.absolute_path)
        raise ParseError(f"{where}: {err.message}", field=where)

    try:
        frame = Frame(tuple(data["frame"]))
    except UnknownAtom:
        raise
    except FrameError as exc:
        raise ValidationError(f"frame: {exc}") from exc

    def subset(names, where):
        try:
            return frame.subset(names)
        except UnknownAtom as exc:
            raise UnknownAtom(f"{where}: {exc}") from exc

    prior_doc = data["prior"]
    entries = [(subset(e["set"], f"prior.entries[{i}].set"), float(e["value"]))
               for i, e in enumerate(prior_doc["entries"])]
    try:
        if prior_doc["type"] == "mass":
            if "kind" in prior_doc:
                raise ValidationError("prior.kind only applies to bounds")
            seen = set()
            for i, (s, _) in enumerate(entries):
                if s.mask in seen:
                    raise ValidationError(f"prior.entries[{i}]: set {s} listed twice")
                seen.add(s.mask)
            prior: Union[MassFunction, SupportFunction] = MassFunction(frame, dict(entries))
        else:
            bounds: dict = {}
            for s, v in entries:
                bounds[s] = max(bounds.get(s, 0.0), v)
            if frame.full not in bounds:
                bounds[frame.full] = 1.0
            prior = SupportFunction.from_bounds(frame, bounds, prior_doc.get("kind", RAW))
    except (InvalidMass, InvalidSupport, NotABeliefFunction) as exc:
        raise ValidationError(f"prior: {exc}") from exc

    rules = []
    for i, r in enumerate(data.get("rules", [])):
        where = f"rules[{i}]"
        try:
            rules.append(Rule(subset(r["then"], f"{where}.then"),
                              subset(r["given"], f"{where}.given"),
                              float(r["lower"]), bool(r.get("unconditional", False))))
        except (InvalidBound, EmptyAntecedent) as exc:
            raise ValidationError(f"{where}: {exc}") from exc
    try:
        rulebase = make_rulebase(frame, rules)
    except InconsistentRule as exc:
        raise ValidationError(f"rules: {exc}") from exc

    opts = data.get("options", {})
    options = Options(
        tol=float(opts.get("tol", TOL)),
        max_sweeps=opts.get("max_sweeps"),
        exact=bool(opts.get("exact", False)),
        closure=bool(opts.get("closure", False)),
        partition_cap=int(opts.get("partition_cap", PARTITION_CAP)),
        iterate_partition=bool(opts.get("iterate_partition", False)),
    )
    return Problem(frame, prior, rulebase, data.get("engine", "all"), options)


# -- formatting --------------------------------------------------------------

def fmt(v) -> float:
    """Round to 12 significant digits; negative zero becomes zero."""
    out = float(f"{float(v):.12g}")
    return 0.0 if out == 0.0 else out


def _support_doc(b: SupportFunction) -> dict:
    return {str(PropSet(b.frame, k)): fmt(b.values[k]) for k in range(b.frame.size)}


def _mass_doc(m: MassFunction) -> dict:
    return {str(s): fmt(w) for s, w in m.items()}


def _report_doc(report: ConsistencyReport) -> dict:
    return {
        "consistent": report.consistent,
        "violations": [
            {"then": str(v.x), "given": str(v.y), "required": fmt(v.required),
             "achieved": fmt(v.achieved)}
            for v in report.violations
        ],
    }


def _echo(problem: Problem) -> dict:
    frame = problem.frame
    if isinstance(problem.prior, MassFunction):
        prior = {"type": "mass", "entries": _mass_doc(problem.prior)}
    else:
        prior = {"type": "bounds", "kind": problem.prior.kind,
                 "entries": {str(s): fmt(v) for s, v in problem.prior.items() if v > 0.0}}
    rules = []
    for r in problem.rules.rules:
        doc = {"then": str(r.consequent), "given": str(r.antecedent), "lower": fmt(r.lower)}
        if r.unconditional:
            doc["unconditional"] = True
        rules.append(doc)
    o = problem.options
    return {
        "frame": list(frame.atoms),
        "prior": prior,
        "rules": rules,
        "engine": problem.engine,
        "options": {"tol": o.tol, "max_sweeps": o.max_sweeps, "exact": o.exact,
                    "closure": o.closure, "partition_cap": o.partition_cap,
                    "iterate_partition": o.iterate_partition},
    }


# -- engines -----------------------------------------------------------------
# each returns (section dict, refined support or None)

def _run_bayes(p: Problem):
    o = p.options
    out, sweeps = refine_bayes(p.support, p.rules, max_sweeps=o.max_sweeps, tol=o.tol,
                               full_output=True)
    return {"support": _support_doc(out), "sweeps": sweeps,
            "check": _report_doc(check_bayes(out, p.rules, o.tol))}, out


def _run_optimistic(p: Problem):
    o = p.options
    if o.closure:
        out, rounds = refine_optimistic_closed(p.support, p.rules, max_sweeps=o.max_sweeps,
                                               tol=o.tol, full_output=True)
        section = {"closure": True, "rounds": rounds}
    else:
        out, sweeps = refine_optimistic(p.support, p.rules, max_sweeps=o.max_sweeps,
                                        tol=o.tol, full_output=True)
        section = {"closure": False, "sweeps": sweeps}
    section["support"] = _support_doc(out)
    section["check"] = _report_doc(check_optimistic(out, p.rules, o.tol))
    return section, out


def _run_general_check(p: Problem):
    o = p.options
    b = p.belief()
    return {
        "general": _report_doc(check_general(b, p.rules, o.tol)),
        "optimistic": _report_doc(check_optimistic(b, p.rules, o.tol)),
        "bayes": _report_doc(check_bayes(b, p.rules, o.tol)),
    }, None


def _run_partition(p: Problem):
    o = p.options
    out, passes = refine_partition(p.support, p.rules, iterate=o.iterate_partition,
                                   cap=o.partition_cap, max_sweeps=o.max_sweeps,
                                   full_output=True)
    return {"iterate": o.iterate_partition, "passes": passes,
            "support": _support_doc(out)}, out


def _run_mass(p: Problem):
    o = p.options
    m = conditionalize_mass(p.mass(), p.rules, cap=o.partition_cap, tol=o.tol)
    b = belief_from_mass(m)
    return {"mass": _mass_doc(m), "support": _support_doc(b)}, b


def _run_oracle(p: Problem):
    o = p.options
    b = p.support
    frame = b.frame
    poly = build_polytope(b, p.rules)
    values = [Fraction(0) if o.exact else 0.0] * frame.size
    for x in range(1, frame.size):
        values[x] = min_prob(poly, PropSet(frame, x), o.exact)
    out = SupportFunction(frame, [max(float(v), b.values[k]) for k, v in enumerate(values)], RAW)
    section = {"support": _support_doc(out)}
    if o.exact:
        section["rational"] = {str(PropSet(frame, k)): str(v) for k, v in enumerate(values)}
    section["prior_check"] = _report_doc(check_consistency_definition(b, p.rules, tol=o.tol))
    return section, out


_DISPATCH = {
    "bayes": _run_bayes,
    "optimistic": _run_optimistic,
    "general-check": _run_general_check,
    "partition": _run_partition,
    "mass": _run_mass,
    "oracle": _run_oracle,
}


def _error_doc(status: str, exc: Exception) -> dict:
    doc = {"status": status, "error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, NegativeMass) and exc.witness is not None:
        doc["witness"] = str(exc.witness)
        doc["outflow"] = fmt(exc.outflow)
    return doc


def run(problem: Problem, *, timing: bool = False) -> Report:
    """Run the selected engine, or every engine plus the oracle for ``"all"``."""
    all_mode = problem.engine == "all"
    names = ENGINES if all_mode else (problem.engine,)
    engines: dict = {}
    refined: dict = {}
    times: dict = {}
    exit_code = EXIT_OK
    for name in names:
        start = time.perf_counter()
        try:
            section, out = _DISPATCH[name](problem)
            engines[name] = {"status": "ok", **section}
            if out is not None:
                refined[name] = out
        except INPUT_ERRORS as exc:
            # in "all" mode an engine that cannot take this input is skipped
            engines[name] = _error_doc("skipped" if all_mode else "error", exc)
            if not all_mode:
                exit_code = EXIT_INPUT
        except RUNTIME_ERRORS as exc:
            engines[name] = _error_doc("error", exc)
            exit_code = max(exit_code, EXIT_INCONSISTENT)
        times[name] = time.perf_counter() - start

    data = {"version": __version__, "input": _echo(problem), "engines": engines}
    if all_mode:
        data.update(_comparison(problem, refined))
    if timing:
        data["timing"] = {k: fmt(v) for k, v in times.items()}
    return Report(data, exit_code)


def _comparison(problem: Problem, refined: dict) -> dict:
    frame = problem.frame
    prior = problem.support
    columns = ["prior"] + [e for e in COMPARED if e in refined]
    if "oracle" in refined:
        columns.append("oracle")
    rows = []
    for k in range(1, frame.full_mask):
        row = {"set": str(PropSet(frame, k)), "prior": fmt(prior.values[k])}
        for e in columns[1:]:
            row[e] = fmt(refined[e].values[k])
        rows.append(row)
    out: dict = {"comparison": {"columns": columns, "rows": rows}}
    if "oracle" in refined:
        ref = refined["oracle"].values
        sound = {}
        for e in COMPARED:
            if e in refined:
                excess = float((refined[e].values - ref).max())
                sound[e] = {"sound": excess <= SOUNDNESS_TOL, "max_excess": fmt(max(excess, 0.0))}
        out["soundness"] = sound
    return out


def render_table(data: dict) -> str:
    """Aligned plain-text rendering of the comparison (or of one engine's support)."""
    if "comparison" in data:
        columns = data["comparison"]["columns"]
        rows = [[r["set"]] + [f"{r[c]:.12g}" for c in columns] for r in data["comparison"]["rows"]]
        header = ["set"] + columns
    else:
        header, rows = ["set", "value"], []
        for name, section in data["engines"].items():
            if "support" in section:
                header = ["set", name]
                rows = [[s, f"{v:.12g}"] for s, v in section["support"].items()]
                break
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    lines = ["  ".join(h.ljust(w) if i == 0 else h.rjust(w)
                       for i, (h, w) in enumerate(zip(header, widths)))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(x.ljust(w) if i == 0 else x.rjust(w)
                               for i, (x, w) in enumerate(zip(row, widths))))
    if "soundness" in data:
        flags = ", ".join(f"{e}={'sound' if s['sound'] else 'UNSOUND'}"
                          for e, s in data["soundness"].items())
        lines.append("")
        lines.append(f"soundness vs oracle: {flags}")
    return "\n".join(lines) + "\n"

