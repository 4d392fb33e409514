"""Smoke test for the qdlc extension: plan, synthesize, simulate, verify."""

import json
import math
import sys

import qdlc


def check(cond, what):
    if not cond:
        print(f"FAIL {what}")
        sys.exit(1)
    print(f"ok   {what}")


def main():
    check(qdlc.t_count_for_rotation(0.5) == 5, "rotation T count")
    check(abs(qdlc.kl_divergence([1.0, 0.0], [0.5, 0.5]) - math.log(2)) < 1e-12, "kl divergence")
    w = qdlc.walsh_transform([0.3, 0.9])
    check(abs(w[0] - 1.2 / math.sqrt(2)) < 1e-12, "walsh transform")

    b = qdlc.Budget(1e-3, 0.25)
    check(abs(b.eps_p - 2.5e-4) < 1e-18 and abs(b.eps_a - 7.5e-4) < 1e-18, "budget split")

    t = qdlc.Target([2.0, 0.0, 0.0, 0.0])
    check(t.n_qubits == 2 and t.scale == 2.0, "target normalization")

    g = qdlc.Target.gaussian(8, 0.3)
    report = qdlc.plan(g, 1e-3)
    sel = report.selected
    check(sel is not None and sel.feasible, f"plan selects {sel.method}")
    check(len(report.rows) == 20 * 5, "one row per method and omega")
    json.loads(report.to_json())

    circ = qdlc.synthesize(report, g)
    out = circ.simulate()
    check(abs(sum(abs(a) ** 2 for a in out) - 1.0) < 1e-10, "simulated state is normalized")
    v = qdlc.verify(circ, g)
    check(v.status == "pass" and v.passed, f"verify {v.achieved_error:.2e} <= {v.bound:.2e}")

    again = qdlc.Circuit.from_json(circ.to_json())
    check(len(again) == len(circ) and again.plan.method == sel.method, "circuit json round trip")

    m = qdlc.synthesize_method("mottonen", qdlc.Target([0.5, 0.5, 0.5, 0.5]), qdlc.Budget(1e-3, 1.0))
    check(m.plan.rotation_count == 3, "mottonen on a uniform 2-qubit state")

    d = qdlc.Target([1.0, 0.5, 0.0, -0.5], task="diagonal")
    r = qdlc.plan(d, 1e-3, methods=["diag-walsh", "diag-mottonen"])
    v = qdlc.verify(qdlc.synthesize(r, d), d)
    check(v.norm == "linf" and v.passed, f"diagonal via {r.selected.method}")

    try:
        qdlc.Target([1.5, 0.2], task="diagonal")
        check(False, "diagonal norm violation raises")
    except qdlc.QdlcException:
        check(True, "diagonal norm violation raises")

    r = qdlc.plan(qdlc.Target.parabola(6), 1e-12, methods=["diag-qsp"])
    check(r.selected is None and r.infeasibility[0][0] == "diag-qsp", "infeasible plan is reported")
    try:
        qdlc.synthesize(r, qdlc.Target.parabola(6))
        check(False, "synthesizing an infeasible plan raises")
    except qdlc.InfeasibleError:
        check(True, "synthesizing an infeasible plan raises")

    print("smoke test passed")


if __name__ == "__main__":
    main()
