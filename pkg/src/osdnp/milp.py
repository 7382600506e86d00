"""The linearized integer program over stop-selection variables.

Variables: one binary x per stop, one binary y per (zone, candidate stop),
one continuous access variable per zone.  Constraints: per-zone cover, the
big-M linearization tying each zone's access variable to its nearest kept
candidate, per-pair delay caps, and the cardinality budget.  The constant
part of the objective (in-network travel) is kept out of the model and
re-added at decode time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .common import INF, to_fraction
from .errors import ConsistencyError, EmptyCandidateError, ValidationError
from .evaluate import StopSelection, budget, evaluate_selection
from .metrics import MetricsBundle


@dataclass(frozen=True)
class LinearConstraint:
    name: str
    terms: Mapping[str, Fraction]  # variable -> coefficient, no zeros stored
    sense: str  # "<=", ">=" or "="
    rhs: Fraction


@dataclass(frozen=True, eq=False)
class MilpModel:
    binaries: Tuple[str, ...]  # x variables first, then y variables
    continuous: Tuple[str, ...]
    objective: Dict[str, Fraction]  # may hold zero coefficients (zero-demand zones)
    constraints: Tuple[LinearConstraint, ...]
    bounds: Dict[str, Tuple[Fraction, Optional[Fraction]]]  # continuous only
    big_m: Dict[str, int]  # zone id -> M_u
    budget: int
    pc_const: int
    x_of_stop: Dict[str, str]
    stop_of_x: Dict[str, str]
    dacc_of_zone: Dict[str, str]
    y_of: Dict[Tuple[str, str], str]  # (zone, stop) -> y variable
    zone_candidates: Dict[str, Tuple[Tuple[str, int], ...]]  # zone -> ((stop, d)...)

    def constraint(self, name: str) -> LinearConstraint:
        for con in self.constraints:
            if con.name == name:
                return con
        raise KeyError(name)


_SAFE = re.compile(r"[^A-Za-z0-9_]")


class _Namer:
    def __init__(self):
        self.used = set()

    def make(self, raw: str) -> str:
        base = _SAFE.sub("_", raw)
        name = base
        serial = 1
        while name in self.used:
            serial += 1
            name = f"{base}_{serial}"
        self.used.add(name)
        return name


def build_milp(metrics: MetricsBundle, prune_implied_pairs: bool = False) -> MilpModel:
    """Construct the program for a metrics bundle.

    prune_implied_pairs skips pair rows already implied by the access-variable
    bounds (cap >= k1*d_acc1 + k2*d_acc2); the default emits every configured
    pair so the model audits 1:1 against the constraint definitions.
    """
    inst = metrics.instance
    zone_ids = inst.zone_ids
    stop_ids = inst.stop_ids
    cand_map = metrics.candidates
    for z in zone_ids:
        if not cand_map[z]:
            raise EmptyCandidateError(z)

    var_namer = _Namer()
    con_namer = _Namer()
    x_of_stop = {s: var_namer.make(f"x_{s}") for s in stop_ids}
    y_of: Dict[Tuple[str, str], str] = {}
    zone_candidates: Dict[str, Tuple[Tuple[str, int], ...]] = {}
    access_of = {}
    for i, z in enumerate(zone_ids):
        lo, hi = metrics.cand_ptr[i], metrics.cand_ptr[i + 1]
        zone_candidates[z] = tuple(
            (stop_ids[v], int(d)) for v, d in zip(metrics.cand_idx[lo:hi], metrics.cand_d[lo:hi])
        )
        for s, _ in zone_candidates[z]:
            y_of[(z, s)] = var_namer.make(f"y_{z}_{s}")
        access_of[z] = var_namer.make(f"dacc_{z}")

    binaries = [x_of_stop[s] for s in stop_ids]
    binaries.extend(y_of[(z, s)] for z in zone_ids for s, _ in zone_candidates[z])
    continuous = tuple(access_of[z] for z in zone_ids)

    objective = {access_of[z]: Fraction(int(metrics.weight_arr[i])) for i, z in enumerate(zone_ids)}

    constraints: List[LinearConstraint] = []
    big_m: Dict[str, int] = {}

    def add(name: str, terms: Dict[str, Fraction], sense: str, rhs) -> None:
        clean = {v: Fraction(c) for v, c in terms.items() if c != 0}
        constraints.append(LinearConstraint(con_namer.make(name), clean, sense, Fraction(rhs)))

    for i, z in enumerate(zone_ids):
        cands = zone_candidates[z]
        m_u = max(d for _, d in cands)
        big_m[z] = m_u
        dacc = access_of[z]
        add(f"cover_{z}", {x_of_stop[s]: Fraction(1) for s, _ in cands}, ">=", 1)
        for s, d in cands:
            # dacc_u <= d + (1 - x_v) * M  rearranged
            add(f"linUB_{z}_{s}", {dacc: Fraction(1), x_of_stop[s]: Fraction(m_u)}, "<=", d + m_u)
            # d + (1 - x_v) M - M (1 - y_v) - sum_{v' != v} M y_v' <= dacc_u
            terms = {x_of_stop[s]: Fraction(-m_u), dacc: Fraction(-1)}
            for s2, _ in cands:
                terms[y_of[(z, s2)]] = Fraction(m_u) if s2 == s else Fraction(-m_u)
            add(f"linLB_{z}_{s}", terms, "<=", -d)
        add(f"linSum_{z}", {y_of[(z, s)]: Fraction(1) for s, _ in cands}, "=", 1)

    alpha = inst.params.alpha
    for i in range(inst.n_u):
        for j in range(i, inst.n_u):
            if not metrics.pair_mask[i, j]:
                continue
            pc_leg = int(metrics.pc_zone[i, j])
            if pc_leg >= INF:
                continue  # unreachable pair carries no finite bound
            opt = int(metrics.d_acc_arr[i]) + int(metrics.d_acc_arr[j]) + pc_leg
            rhs = alpha * opt - pc_leg
            if prune_implied_pairs:
                z1, z2 = zone_ids[i], zone_ids[j]
                implied_at = inst.params.k[z1] * int(metrics.d_acc_arr[i]) + inst.params.k[z2] * int(
                    metrics.d_acc_arr[j]
                )
                if rhs >= implied_at:
                    continue
            if i == j:
                add(f"pair_{zone_ids[i]}_{zone_ids[j]}", {access_of[zone_ids[i]]: Fraction(2)}, "<=", rhs)
            else:
                add(
                    f"pair_{zone_ids[i]}_{zone_ids[j]}",
                    {access_of[zone_ids[i]]: Fraction(1), access_of[zone_ids[j]]: Fraction(1)},
                    "<=",
                    rhs,
                )

    max_kept = budget(inst)
    add("card", {x_of_stop[s]: Fraction(1) for s in stop_ids}, "<=", max_kept)

    bounds = {}
    for i, z in enumerate(zone_ids):
        hi = inst.params.k[z] * int(metrics.d_acc_arr[i])
        bounds[access_of[z]] = (Fraction(0), Fraction(hi))

    return MilpModel(
        binaries=tuple(binaries),
        continuous=continuous,
        objective=objective,
        constraints=tuple(constraints),
        bounds=bounds,
        big_m=big_m,
        budget=max_kept,
        pc_const=metrics.pc_const,
        x_of_stop=x_of_stop,
        stop_of_x={v: s for s, v in x_of_stop.items()},
        dacc_of_zone=access_of,
        y_of=y_of,
        zone_candidates=zone_candidates,
    )


# ----------------------------------------------------------------------
# LP text format
# ----------------------------------------------------------------------


def _frac_str(q: Fraction) -> str:
    """Exact decimal when the denominator is 2^a * 5^b; 15 significant
    digits otherwise (only reachable for unusual alpha / k choices)."""
    if q.denominator == 1:
        return str(q.numerator)
    d = q.denominator
    n2 = n5 = 0
    while d % 2 == 0:
        d //= 2
        n2 += 1
    while d % 5 == 0:
        d //= 5
        n5 += 1
    if d == 1:
        shift = max(n2, n5)
        scaled = q.numerator * 10 ** shift // q.denominator
        digits = str(abs(scaled)).rjust(shift + 1, "0")
        body = digits[:-shift] + "." + digits[-shift:]
        return "-" + body if scaled < 0 else body
    # lossy fixed-point fallback, kept free of exponent notation so the
    # reader's tokenizer stays simple
    return f"{float(q):.12f}"


def _expr_str(terms: Mapping[str, Fraction], order: Sequence[str], keep_zero: bool = False) -> str:
    parts: List[str] = []
    for var in order:
        coef = terms.get(var)
        if coef is None or (coef == 0 and not keep_zero):
            continue
        mag = abs(coef)
        body = var if mag == 1 and coef != 0 else f"{_frac_str(mag)} {var}"
        if not parts:
            parts.append(body if coef >= 0 else f"- {body}")
        else:
            parts.append(f"+ {body}" if coef >= 0 else f"- {body}")
    return " ".join(parts) if parts else "0 " + (order[0] if order else "")


def _wrap(line: str, width: int = 200) -> Iterable[str]:
    if len(line) <= width:
        yield line
        return
    words = line.split(" ")
    cur = words[0]
    for w in words[1:]:
        if len(cur) + 1 + len(w) > width:
            yield cur
            cur = " " + w
        else:
            cur = cur + " " + w
    yield cur


def export_lp(model: MilpModel, sink) -> None:
    """Write the model in the common LP text format."""
    out: List[str] = ["Minimize"]
    obj = _expr_str(model.objective, list(model.continuous), keep_zero=True)
    out.extend(_wrap(f" obj: {obj}"))
    out.append("Subject To")
    for con in model.constraints:
        order = list(con.terms.keys())
        out.extend(_wrap(f" {con.name}: {_expr_str(con.terms, order)} {con.sense} {_frac_str(con.rhs)}"))
    out.append("Bounds")
    for var in model.continuous:
        lo, hi = model.bounds[var]
        if hi is None:
            out.append(f" {_frac_str(lo)} <= {var}")
        else:
            out.append(f" {_frac_str(lo)} <= {var} <= {_frac_str(hi)}")
    out.append("Binary")
    out.extend(_wrap(" " + " ".join(model.binaries)))
    out.append("End")
    sink.write("\n".join(out) + "\n")


def name_map_json(model: MilpModel) -> dict:
    """Companion mapping from sanitized variable names to original ids."""
    variables: Dict[str, dict] = {}
    for stop, var in model.x_of_stop.items():
        variables[var] = {"kind": "stop", "stop": stop}
    for (zone, stop), var in model.y_of.items():
        variables[var] = {"kind": "assign", "zone": zone, "stop": stop}
    for zone, var in model.dacc_of_zone.items():
        variables[var] = {"kind": "access", "zone": zone}
    return {"variables": variables}


@dataclass(frozen=True)
class ParsedLp:
    objective: Dict[str, Fraction]
    constraints: Tuple[LinearConstraint, ...]
    bounds: Dict[str, Tuple[Fraction, Optional[Fraction]]]
    binaries: Tuple[str, ...]


_NUM = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")
_NAME_AT = re.compile(r"([A-Za-z][A-Za-z0-9_]*)\s*:")


def _is_number(tok: str) -> bool:
    return bool(_NUM.match(tok))


def _parse_number(tok: str) -> Fraction:
    if "e" in tok or "E" in tok:
        return Fraction(float(tok)).limit_denominator(10 ** 15)
    return Fraction(tok)


def _parse_terms(text: str) -> Dict[str, Fraction]:
    text = text.replace("+", " + ").replace("-", " - ")
    terms: Dict[str, Fraction] = {}
    sign = Fraction(1)
    coef: Optional[Fraction] = None
    for tok in text.split():
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        if _is_number(tok):
            coef = (coef if coef is not None else Fraction(1)) * _parse_number(tok)
            continue
        value = sign * (coef if coef is not None else Fraction(1))
        terms[tok] = terms.get(tok, Fraction(0)) + value
        sign = Fraction(1)
        coef = None
    return terms


def parse_lp(text: str) -> ParsedLp:
    """Internal LP reader used for round-trip testing.

    Understands the subset export_lp emits: named constraints, two-sided or
    one-sided bounds, a Binary section, comment lines starting with a
    backslash.
    """
    sections: Dict[str, List[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].rstrip()
        if not line.strip():
            continue
        word = line.strip().lower()
        if word in ("minimize", "maximize"):
            current = "objective"
            sections.setdefault(current, [])
            continue
        if word in ("subject to", "st", "s.t.", "such that"):
            current = "constraints"
            sections.setdefault(current, [])
            continue
        if word in ("bounds", "bound"):
            current = "bounds"
            sections.setdefault(current, [])
            continue
        if word in ("binary", "binaries", "bin"):
            current = "binary"
            sections.setdefault(current, [])
            continue
        if word in ("general", "generals", "gen"):
            current = "general"
            sections.setdefault(current, [])
            continue
        if word == "end":
            current = None
            continue
        if current is None:
            raise ValidationError(f"LP text outside any section: {line!r}")
        sections[current].append(line)

    obj_text = " ".join(sections.get("objective", []))
    if ":" in obj_text:
        obj_text = obj_text.split(":", 1)[1]
    objective = _parse_terms(obj_text)

    con_text = " ".join(sections.get("constraints", []))
    constraints: List[LinearConstraint] = []
    marks = list(_NAME_AT.finditer(con_text))
    for pos, mark in enumerate(marks):
        body_end = marks[pos + 1].start() if pos + 1 < len(marks) else len(con_text)
        body = con_text[mark.end():body_end].strip()
        sense_match = re.search(r"(<=|>=|=|<|>)", body)
        if not sense_match:
            raise ValidationError(f"constraint {mark.group(1)} has no sense")
        sense = {"<": "<=", ">": ">="}.get(sense_match.group(1), sense_match.group(1))
        lhs = body[: sense_match.start()]
        rhs_text = body[sense_match.end():].strip()
        terms = {v: c for v, c in _parse_terms(lhs).items() if c != 0}
        constraints.append(LinearConstraint(mark.group(1), terms, sense, _parse_number(rhs_text)))

    bounds: Dict[str, Tuple[Fraction, Optional[Fraction]]] = {}
    for line in sections.get("bounds", []):
        toks = line.replace("<=", " <= ").replace(">=", " >= ").split()
        if len(toks) == 5 and toks[1] == "<=" and toks[3] == "<=":
            bounds[toks[2]] = (_parse_number(toks[0]), _parse_number(toks[4]))
        elif len(toks) == 3 and toks[1] == "<=" and _is_number(toks[0]):
            bounds[toks[2]] = (_parse_number(toks[0]), None)
        elif len(toks) == 3 and toks[1] == "<=":
            bounds[toks[0]] = (Fraction(0), _parse_number(toks[2]))
        elif len(toks) == 3 and toks[1] == ">=":
            bounds[toks[0]] = (_parse_number(toks[2]), None)
        elif len(toks) == 2 and toks[1].lower() == "free":
            bounds[toks[0]] = (Fraction(0), None)
        else:
            raise ValidationError(f"unparsable bound line: {line!r}")

    binaries = tuple(" ".join(sections.get("binary", [])).split())
    return ParsedLp(objective=objective, constraints=tuple(constraints), bounds=bounds, binaries=binaries)


# ----------------------------------------------------------------------
# assignments
# ----------------------------------------------------------------------


def read_values(stream) -> Dict[str, Fraction]:
    """Thin reader for "name value" lines (solver output, comments with #)."""
    values: Dict[str, Fraction] = {}
    text = stream.read() if hasattr(stream, "read") else stream
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValidationError(f"expected 'name value': {raw!r}")
        values[parts[0]] = to_fraction(parts[1]) if not _is_number(parts[1]) else _parse_number(parts[1])
    return values


def normalized_int_constraints(model: MilpModel):
    """Constraints scaled to integer coefficients for fast exact checks."""
    out = []
    for con in model.constraints:
        den = con.rhs.denominator
        for c in con.terms.values():
            den = lcm(den, c.denominator)
        terms = {v: int(c * den) for v, c in con.terms.items()}
        out.append((con.name, terms, con.sense, int(con.rhs * den), den))
    return out


def assignment_satisfies(model: MilpModel, values: Mapping[str, object], normalized=None):
    """Exact feasibility of a full variable assignment (bounds included).

    Returns (ok, failed_names).  Missing variables count as 0.
    """
    vals = {v: to_fraction(x) for v, x in values.items()}
    failed: List[str] = []
    for var in model.binaries:
        q = vals.get(var, Fraction(0))
        if q not in (0, 1):
            failed.append(f"binary:{var}")
    for var in model.continuous:
        lo, hi = model.bounds[var]
        q = vals.get(var, Fraction(0))
        if q < lo or (hi is not None and q > hi):
            failed.append(f"bound:{var}")
    all_int = all(v.denominator == 1 for v in vals.values())
    if normalized is None:
        normalized = normalized_int_constraints(model)
    if all_int:
        ints = {v: int(q) for v, q in vals.items()}
        for name, terms, sense, rhs, _ in normalized:
            total = sum(c * ints.get(v, 0) for v, c in terms.items())
            if not _sense_ok(total, sense, rhs):
                failed.append(name)
    else:
        for con in model.constraints:
            total = sum(c * vals.get(v, Fraction(0)) for v, c in con.terms.items())
            if not _sense_ok(total, con.sense, con.rhs):
                failed.append(con.name)
    return not failed, failed


def _sense_ok(total, sense: str, rhs) -> bool:
    if sense == "<=":
        return total <= rhs
    if sense == ">=":
        return total >= rhs
    return total == rhs


def forced_assignment(model: MilpModel, kept: Iterable[str]) -> Dict[str, int]:
    """Canonical full assignment for a 0/1 stop selection.

    dacc takes the linearization's forced value min(d + (1 - x) * M) over the
    zone's candidates; y is one-hot at the first candidate (candidate order)
    attaining that minimum.
    """
    kept_set = set(kept)
    values: Dict[str, int] = {}
    for stop, var in model.x_of_stop.items():
        values[var] = 1 if stop in kept_set else 0
    for zone, cands in model.zone_candidates.items():
        m_u = model.big_m[zone]
        best_val = None
        best_stop = None
        for stop, d in cands:
            x = 1 if stop in kept_set else 0
            val = d + (1 - x) * m_u
            if best_val is None or val < best_val:
                best_val = val
                best_stop = stop
        values[model.dacc_of_zone[zone]] = int(best_val)
        for stop, _ in cands:
            values[model.y_of[(zone, stop)]] = 1 if stop == best_stop else 0
    return values


def objective_value(model: MilpModel, values: Mapping[str, object]) -> Fraction:
    total = Fraction(0)
    for var, coef in model.objective.items():
        total += coef * to_fraction(values.get(var, 0))
    return total


def decode_assignment(model: MilpModel, values: Mapping[str, object], metrics: MetricsBundle) -> StopSelection:
    """Turn solver output into an evaluated selection.

    Binaries are rounded within a 1e-6 integrality tolerance (missing ones
    count as 0, matching solvers that omit zero variables).  The decoded
    selection is re-evaluated; the set view and the model view must agree on
    feasibility and objective, anything else raises a consistency error.
    """
    tol = Fraction(1, 10 ** 6)
    rounded: Dict[str, int] = {}
    for var in model.binaries:
        q = to_fraction(values.get(var, 0))
        nearest = 1 if q >= Fraction(1, 2) else 0
        if abs(q - nearest) > tol:
            raise ValidationError(f"non-integral binary {var} = {q}", var)
        rounded[var] = nearest
    kept = {s for s, var in model.x_of_stop.items() if rounded[var] == 1}
    selection = evaluate_selection(metrics, kept)
    full = forced_assignment(model, kept)
    ok, _failed = assignment_satisfies(model, full)
    if ok != selection.feasible:
        raise ConsistencyError(
            f"model feasibility ({ok}) disagrees with set evaluation ({selection.feasible})"
        )
    if ok:
        obj = objective_value(model, full)
        if obj + model.pc_const != selection.twt:
            raise ConsistencyError(
                f"objective mismatch: model {obj} + {model.pc_const} != twt {selection.twt}"
            )
    return selection
