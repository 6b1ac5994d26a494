#!/usr/bin/env python3
"""Solve an exported MPS model with an external solver and write solution.txt.

Usage: mps_solve.py <dir> [--gap FRAC] [--time-limit SEC]

Reads <dir>/model.mps and writes <dir>/solution.txt in the `name value`
format read back by `fleetcbm --solver mps:<dir>`. HiGHS (highspy) is used
when installed, otherwise scipy.optimize.milp.
"""

import argparse
import pathlib
import sys


def solve_highs(path, gap, time_limit):
    import highspy

    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", gap)
    if time_limit is not None:
        h.setOptionValue("time_limit", time_limit)
    h.readModel(str(path))
    h.run()
    status = h.modelStatusToString(h.getModelStatus()).lower()
    if "optimal" not in status:
        return ("infeasible" if "infeasible" in status else status.replace(" ", "-")), None
    names = h.getLp().col_names_
    return "optimal", list(zip(names, h.getSolution().col_value))


def read_mps(path):
    """Minimal free-format MPS reader for the subset fleetcbm writes."""
    rows, senses, cols, obj = [], {}, {}, {}
    entries, rhs, integer, bounds = [], {}, set(), {}
    section, in_int = None, False
    for raw in pathlib.Path(path).read_text().splitlines():
        if not raw.strip() or raw.startswith("*"):
            continue
        if not raw[0].isspace():
            section = raw.split()[0]
            continue
        tok = raw.split()
        if section == "ROWS":
            if tok[0] != "N":
                senses[tok[1]] = tok[0]
                rows.append(tok[1])
        elif section == "COLUMNS":
            if len(tok) >= 3 and tok[1] == "'MARKER'":
                in_int = tok[2] == "'INTORG'"
                continue
            name = tok[0]
            cols.setdefault(name, len(cols))
            if in_int:
                integer.add(name)
            for r, v in zip(tok[1::2], tok[2::2]):
                if r == "OBJ":
                    obj[name] = float(v)
                else:
                    entries.append((r, name, float(v)))
        elif section == "RHS":
            for r, v in zip(tok[1::2], tok[2::2]):
                rhs[r] = float(v)
        elif section == "BOUNDS":
            kind, name = tok[0], tok[2]
            lo, hi = bounds.get(name, (0.0, float("inf")))
            val = float(tok[3]) if len(tok) > 3 else None
            if kind == "FX":
                lo = hi = val
            elif kind == "LO":
                lo = val
            elif kind == "UP":
                hi = val
            elif kind == "MI":
                lo = -float("inf")
            elif kind == "PL":
                hi = float("inf")
            elif kind == "FR":
                lo, hi = -float("inf"), float("inf")
            bounds[name] = (lo, hi)
    return rows, senses, cols, obj, entries, rhs, integer, bounds


def solve_scipy(path, gap, time_limit):
    import numpy as np
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import coo_matrix

    rows, senses, cols, obj, entries, rhs, integer, bounds = read_mps(path)
    names = sorted(cols, key=cols.get)
    rindex = {r: k for k, r in enumerate(rows)}
    a = coo_matrix(
        ([v for _, _, v in entries], ([rindex[r] for r, _, _ in entries], [cols[c] for _, c, _ in entries])),
        shape=(len(rows), len(names)),
    )
    lo = np.full(len(rows), -np.inf)
    hi = np.full(len(rows), np.inf)
    for r, k in rindex.items():
        b = rhs.get(r, 0.0)
        if senses[r] in ("E", "G"):
            lo[k] = b
        if senses[r] in ("E", "L"):
            hi[k] = b
    c = np.array([obj.get(n, 0.0) for n in names])
    lb = np.array([bounds.get(n, (0.0, np.inf))[0] for n in names])
    ub = np.array([bounds.get(n, (0.0, np.inf))[1] for n in names])
    options = {"mip_rel_gap": gap}
    if time_limit is not None:
        options["time_limit"] = time_limit
    res = milp(
        c,
        constraints=LinearConstraint(a.tocsr(), lo, hi),
        integrality=np.array([1 if n in integer else 0 for n in names]),
        bounds=Bounds(lb, ub),
        options=options,
    )
    if res.x is None:
        return ("infeasible" if res.status == 2 else "time-limit"), None
    return "optimal", list(zip(names, res.x))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dir")
    ap.add_argument("--gap", type=float, default=1e-6)
    ap.add_argument("--time-limit", type=float, default=None)
    args = ap.parse_args()
    d = pathlib.Path(args.dir)
    try:
        import highspy  # noqa: F401

        solve = solve_highs
    except ImportError:
        solve = solve_scipy
    status, values = solve(d / "model.mps", args.gap, args.time_limit)
    with open(d / "solution.txt", "w") as f:
        f.write(f"# status {status}\n")
        for name, v in values or []:
            f.write(f"{name} {v:.17g}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
