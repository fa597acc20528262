"""Acceptance gate: one test per criterion, tolerances pinned.

Each test reports its sub-checks through the ``verdict`` fixture; the
terminal summary lists one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np

from robustgates import cli
from robustgates import coupling as cp
from robustgates.counting import CountingProblem, GateBackend, envelope_decay_rate, reference_signal, run_counting
from robustgates.harness.experiments import (
    SIMPLIFY_THRESHOLD,
    corruption,
    excitation_signal,
    multiplet_error,
    multiplet_series,
    multiplet_spread,
    simplify_demo,
)
from robustgates.pulses import ErrorModel, composite, sequence_propagator
from robustgates.qcore import infidelity, propagator_fidelity

HALF_PI = math.pi / 2
F_GRID = np.round(np.arange(-100, 101) * 0.01, 12)

SIXTH_ORDER_PI = 4.694283171754416  # 45 pi^6 / 9216
BB1_TILT_DEG = 97.18075578145829  # arccos(-1/8)
NB1_SILENCE = 1e-12  # |signal| of NB1 at f = +-1, oracle value ~1e-16
MULTIPLET_DAMPING = 0.002  # per unit of nominal rotation angle


def seconds_since(start):
    return time.perf_counter() - start


def inf(family, f, theta=HALF_PI):
    seq = composite(family, theta)
    return infidelity(sequence_propagator(seq, ErrorModel(f)), seq.target())


def test_criterion_1_naive_cosine_law(verdict):
    start = time.perf_counter()
    worst = 0.0
    for theta in (HALF_PI, math.pi):
        seq = composite("naive", theta)
        for f in F_GRID:
            fid = propagator_fidelity(sequence_propagator(seq, ErrorModel(f)), seq.target())
            worst = max(worst, abs(fid - abs(math.cos(f * theta / 2))))
    elapsed = seconds_since(start)
    verdict(1, "naive fidelity equals cos(f theta / 2)", [
        ("max deviation <= 1e-10", worst <= 1e-10, f"{worst:.2e}"),
        ("runtime < 1 s", elapsed < 1, f"{elapsed:.3f} s"),
    ])


def test_criterion_2_bb1_sixth_order_coefficient(verdict):
    start = time.perf_counter()
    f = np.linspace(0.02, 0.1, 17)
    y = np.array([inf("BB1", x, math.pi) for x in f])
    # least squares for y = c f^6
    c = float(np.dot(y, f**6) / np.dot(f**6, f**6))
    elapsed = seconds_since(start)
    rel = abs(c / SIXTH_ORDER_PI - 1)
    verdict(2, "BB1 infidelity coefficient at theta = pi", [
        ("fitted coefficient within 2%", rel < 0.02, f"{c:.4f} vs {SIXTH_ORDER_PI:.4f} ({rel:.2%})"),
        ("runtime < 1 s", elapsed < 1, f"{elapsed:.3f} s"),
    ])


def test_criterion_3_compiled_bb1_coupling(verdict):
    sys = cp.formate()
    elements = cp.composite_coupling("BB1", HALF_PI)
    events = cp.compile_coupling(elements, sys.j(0, 1))
    tilt = math.degrees(elements[1].signed_tilt)
    delays = [e.duration for e in events if isinstance(e, cp.Delay)]
    fid = 1 - infidelity(cp.program_propagator(events, sys), cp.coupling_error_propagator(elements))
    verdict(3, "compiled BB1 coupling gate", [
        ("tilt angle 97.18 +- 0.01 deg", abs(tilt - BB1_TILT_DEG) <= 0.01, f"{tilt:.4f} deg"),
        ("delays t, 4t, 8t, 4t, t", np.allclose(delays, [1, 4, 8, 4, 1]), str([round(d, 12) for d in delays])),
        ("fidelity >= 1 - 1e-10", fid >= 1 - 1e-10, f"1 - {1 - fid:.1e}"),
    ])


def test_criterion_4_family_orderings(verdict):
    start = time.perf_counter()
    checks = []
    for f in (0.05, 0.1, 0.2):
        v = {fam: inf(fam, f) for fam in ("naive", "BB1", "NB1", "PB1", "B4")}
        checks += [
            (f"f={f} BB1 < naive", v["BB1"] < v["naive"], f"{v['BB1']:.2e} < {v['naive']:.2e}"),
            (f"f={f} NB1 > naive", v["NB1"] > v["naive"], f"{v['NB1']:.2e} > {v['naive']:.2e}"),
            (f"f={f} PB1 < naive", v["PB1"] < v["naive"], f"{v['PB1']:.2e} < {v['naive']:.2e}"),
            (f"f={f} B4 <= BB1", v["B4"] <= v["BB1"], f"{v['B4']:.2e} <= {v['BB1']:.2e}"),
        ]
    elapsed = seconds_since(start)
    checks.append(("runtime < 5 s", elapsed < 5, f"{elapsed:.3f} s"))
    verdict(4, "infidelity orderings at theta = pi/2", checks)


def test_criterion_5_excitation_profile(verdict):
    def amp(family, f):
        return abs(excitation_signal(family, HALF_PI, ErrorModel(f)))

    naive_dev = max(abs(amp("naive", f) - math.cos(f * math.pi / 2)) for f in F_GRID)
    pb1_floor = min(amp("PB1", f) for f in F_GRID if abs(f) <= 0.2 + 1e-12)
    pb1_weak, naive_weak = amp("PB1", -0.9), amp("naive", -0.9)
    nb1_edge = max(amp("NB1", -1.0), amp("NB1", 1.0))
    verdict(5, "excitation profile after a 90 degree pulse", [
        ("naive amplitude = cos(f pi / 2) within 1e-10", naive_dev <= 1e-10, f"{naive_dev:.2e}"),
        ("PB1 >= 0.99 for |f| <= 0.2", pb1_floor >= 0.99, f"min {pb1_floor:.5f}"),
        ("PB1 below naive at f = -0.9", pb1_weak < naive_weak, f"{pb1_weak:.4f} < {naive_weak:.4f}"),
        ("NB1 silent at f = +-1", nb1_edge <= NB1_SILENCE, f"{nb1_edge:.1e}"),
    ])


def test_criterion_6_counting(verdict):
    start = time.perf_counter()
    worst = 0.0
    for k in (0, 1, 2):
        problem = CountingProblem(1, k, 20)
        for rec in run_counting(problem, GateBackend()):
            worst = max(worst, abs(rec.signal - reference_signal(problem, rec.r)))
    problem = CountingProblem(1, 1, 20)
    ideal = [reference_signal(problem, r) for r in range(21)]
    rates = {}
    for fam in ("naive", "BB1"):
        backend = GateBackend(fam, error=ErrorModel(0.1), f_spread=0.05)
        rates[fam] = envelope_decay_rate([r.signal for r in run_counting(problem, backend)], ideal)
    elapsed = seconds_since(start)
    verdict(6, "approximate counting signal", [
        ("zero-error signal matches G^r oracle within 1e-8", worst <= 1e-8, f"{worst:.1e}"),
        ("decay rate naive > BB1 at f = 0.1", rates["naive"] > rates["BB1"],
         f"{rates['naive']:.4f} > {rates['BB1']:.2e} per iteration"),
        ("runtime < 30 s", elapsed < 30, f"{elapsed:.2f} s"),
    ])


def test_criterion_7_alanine_multiplet(verdict):
    start = time.perf_counter()
    sys = cp.alanine()
    spread = {}
    error = {}
    for fam in cp.COUPLING_FAMILIES:
        spread[fam] = multiplet_spread(multiplet_series(sys, fam, 10)[-1])
    for fam in ("BB1", "PB1"):
        point = multiplet_series(sys, fam, 10, damping_rate=MULTIPLET_DAMPING)[-1]
        error[fam] = multiplet_error(point, sys)
    elapsed = seconds_since(start)
    ratio = spread["PB1"] / spread["BB1"]
    verdict(7, "13C multiplet of 2-13C alanine after 10 coupling gates", [
        ("spread BB1 < naive < NB1", spread["BB1"] < spread["naive"] < spread["NB1"],
         f"{spread['BB1']:.4f} < {spread['naive']:.4f} < {spread['NB1']:.4f} rad"),
        ("PB1 spread within 2x of BB1", ratio <= 2, f"{spread['PB1']:.4f} / {spread['BB1']:.4f} = {ratio:.2f}"),
        ("PB1 worse than BB1 with damping", error["PB1"] > error["BB1"],
         f"line error {error['PB1']:.3f} > {error['BB1']:.3f}"),
        ("runtime < 2 min", elapsed < 120, f"{elapsed:.2f} s"),
    ])


def test_criterion_8_simplification_fails(verdict):
    rows = simplify_demo(cp.alanine(), CountingProblem(1, 1, 20), GateBackend("naive", "BB1"))
    as_given = corruption(rows, "as-given")
    stripped = corruption(rows, "no-homonuclear")
    verdict(8, "spectator couplings corrupt counting on alanine", [
        ("corruption above threshold with H-methyl couplings", as_given > SIMPLIFY_THRESHOLD,
         f"{as_given:.3f} > {SIMPLIFY_THRESHOLD}"),
        ("corruption below threshold without them", stripped < SIMPLIFY_THRESHOLD,
         f"{stripped:.1e} < {SIMPLIFY_THRESHOLD}"),
    ])


def test_criterion_9_determinism(verdict, tmp_path, capsys):
    checks = []
    for command in cli.COMMANDS:
        outputs = []
        for attempt in ("a", "b"):
            path = tmp_path / f"{command}-{attempt}.csv"
            code = cli.main([command, "--out", str(path)])
            outputs.append(path.read_bytes() if code == 0 else None)
        same = outputs[0] is not None and outputs[0] == outputs[1]
        checks.append((f"{command} byte-identical", same, f"{len(outputs[0] or b'')} bytes"))
    capsys.readouterr()
    verdict(9, "CLI reruns are byte-identical", checks)
