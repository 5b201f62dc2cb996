#!/usr/bin/env python3
"""Solve LP model files with HiGHS and print one objective value per file.

Usage: highs_solve.py MODEL.lp [MODEL.lp ...]

Prints `<path> <objective>` per model, or `<path> infeasible`. Exits 3 if
highspy is not installed.
"""
import sys

try:
    import highspy
except ImportError:
    print("highspy not available", file=sys.stderr)
    sys.exit(3)


def solve(path):
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("mip_rel_gap", 0.0)
    h.setOptionValue("mip_abs_gap", 0.0)
    h.setOptionValue("primal_feasibility_tolerance", 1e-10)
    h.setOptionValue("dual_feasibility_tolerance", 1e-10)
    h.setOptionValue("mip_feasibility_tolerance", 1e-10)
    h.readModel(path)
    h.run()
    status = h.getModelStatus()
    if status != highspy.HighsModelStatus.kOptimal:
        return "infeasible" if status == highspy.HighsModelStatus.kInfeasible else str(status)
    return repr(h.getInfo().objective_function_value)


def main(paths):
    if not paths:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    for p in paths:
        print(p, solve(p))
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
