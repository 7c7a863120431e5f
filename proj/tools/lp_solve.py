#!/usr/bin/env python3
"""Reference external MILP backend.

Usage: lp_solve.py <model.lp> <solution.out>

Reads the CPLEX-LP subset written by the planner's exporter, solves it with
scipy's HiGHS-based MILP interface, and writes a plain-text solution:

    status optimal|feasible|infeasible|timeout
    objective <value>
    bound <value>
    <variable> <value>
    ...

Optional environment variables: XSCHED_TIME_LIMIT_SEC, XSCHED_GAP_LIMIT
(XSCHED_THREADS is accepted and ignored; HiGHS runs single-threaded here).
"""

import math
import os
import re
import sys

import numpy as np
from scipy import sparse
from scipy.optimize import Bounds, LinearConstraint, milp

TERM_RE = re.compile(r"([+-])?\s*(\d+(?:\.\d+)?)?\s*([A-Za-z][A-Za-z0-9_]*)")
ROW_RE = re.compile(
    r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*:\s*(.*?)\s*(<=|>=|=)\s*([-+]?\d+(?:\.\d+)?)\s*$"
)
BOUND_RE = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*<=\s*([-+]?\d+(?:\.\d+)?)\s*$")


class Model:
    def __init__(self):
        self.var_index = {}
        self.objective = {}
        self.rows = []  # (coeffs dict, sense, rhs)
        self.upper = {}
        self.binaries = set()

    def var(self, name):
        if name not in self.var_index:
            self.var_index[name] = len(self.var_index)
        return self.var_index[name]


def parse_terms(expr, model):
    coeffs = {}
    for sign, coef, name in TERM_RE.findall(expr):
        value = float(coef) if coef else 1.0
        if sign == "-":
            value = -value
        idx = model.var(name)
        coeffs[idx] = coeffs.get(idx, 0.0) + value
    return coeffs


def parse_lp(path):
    model = Model()
    section = None
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            line = raw.split("\\")[0].rstrip()
            if not line.strip():
                continue
            lowered = line.strip().lower()
            if lowered in ("minimize", "maximize"):
                section = "objective"
                continue
            if lowered in ("subject to", "st", "s.t."):
                section = "rows"
                continue
            if lowered == "bounds":
                section = "bounds"
                continue
            if lowered in ("binaries", "binary", "bin"):
                section = "binaries"
                continue
            if lowered in ("general", "generals"):
                section = "general"
                continue
            if lowered == "end":
                break

            if section == "objective":
                expr = line.split(":", 1)[1] if ":" in line else line
                for idx, coef in parse_terms(expr, model).items():
                    model.objective[idx] = model.objective.get(idx, 0.0) + coef
            elif section == "rows":
                match = ROW_RE.match(line)
                if not match:
                    raise ValueError(f"unparsable row: {line!r}")
                _, expr, sense, rhs = match.groups()
                model.rows.append((parse_terms(expr, model), sense, float(rhs)))
            elif section == "bounds":
                match = BOUND_RE.match(line)
                if not match:
                    raise ValueError(f"unparsable bound: {line!r}")
                name, value = match.groups()
                model.upper[model.var(name)] = float(value)
            elif section == "binaries":
                for name in line.split():
                    model.binaries.add(model.var(name))
    return model


def main():
    if len(sys.argv) != 3:
        print(__doc__, file=sys.stderr)
        return 2
    model = parse_lp(sys.argv[1])
    n = len(model.var_index)

    c = np.zeros(n)
    for idx, coef in model.objective.items():
        c[idx] = coef

    data, row_ids, col_ids, lo, hi = [], [], [], [], []
    for r, (coeffs, sense, rhs) in enumerate(model.rows):
        for idx, coef in coeffs.items():
            row_ids.append(r)
            col_ids.append(idx)
            data.append(coef)
        if sense == "<=":
            lo.append(-math.inf)
            hi.append(rhs)
        elif sense == ">=":
            lo.append(rhs)
            hi.append(math.inf)
        else:
            lo.append(rhs)
            hi.append(rhs)
    matrix = sparse.csr_matrix((data, (row_ids, col_ids)), shape=(len(model.rows), n))

    lower = np.zeros(n)
    upper = np.full(n, math.inf)
    integrality = np.zeros(n)
    for idx, value in model.upper.items():
        upper[idx] = value
    for idx in model.binaries:
        upper[idx] = min(upper[idx], 1.0)
        integrality[idx] = 1

    options = {}
    time_limit = os.environ.get("XSCHED_TIME_LIMIT_SEC")
    if time_limit:
        options["time_limit"] = float(time_limit)
    gap = os.environ.get("XSCHED_GAP_LIMIT")
    if gap:
        options["mip_rel_gap"] = float(gap)

    result = milp(
        c=c,
        constraints=LinearConstraint(matrix, lo, hi),
        integrality=integrality,
        bounds=Bounds(lower, upper),
        options=options,
    )

    names = sorted(model.var_index, key=model.var_index.get)
    with open(sys.argv[2], "w", encoding="utf-8") as out:
        if result.status == 0:
            status = "optimal"
        elif result.status == 2:
            status = "infeasible"
        elif result.x is not None:
            status = "timeout"
        else:
            print(f"solver failed: {result.message}", file=sys.stderr)
            return 1
        out.write(f"status {status}\n")
        if result.x is not None:
            out.write(f"objective {float(result.fun)}\n")
            bound = getattr(result, "mip_dual_bound", None)
            if bound is not None:
                out.write(f"bound {float(bound)}\n")
            for name, value in zip(names, result.x):
                out.write(f"{name} {float(value)}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
