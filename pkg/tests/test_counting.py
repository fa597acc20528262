import math

import numpy as np
import pytest

from robustgates import coupling as cp
from robustgates.counting import (
    CountingProblem,
    GateBackend,
    controlled,
    counting_pulse_program,
    diagonal_gadget,
    envelope_decay_rate,
    estimate_eigenphase,
    grover_iterate_matrix,
    oracle_unitary,
    reference_circuit,
    reference_signal,
    run_counting,
    zero_reflection,
)
from robustgates.pulses import ErrorModel
from robustgates.qcore import infidelity


def signals(records):
    return np.array([r.signal for r in records])


def reference(problem):
    return np.array([reference_signal(problem, r) for r in range(problem.r_max + 1)])


class TestMatrixLevel:
    @pytest.mark.parametrize("k,diag", [(0, [-1, -1]), (1, [1, -1]), (2, [1, 1])])
    def test_oracle(self, k, diag):
        np.testing.assert_array_equal(np.diag(oracle_unitary(CountingProblem(1, k))), diag)

    def test_assignment_checked(self):
        with pytest.raises(ValueError):
            oracle_unitary(CountingProblem(1, 1), (1, 1))
        with pytest.raises(ValueError):
            CountingProblem(1, 3)

    def test_zero_reflection(self):
        np.testing.assert_array_equal(np.diag(zero_reflection(2)), [-1, 1, 1, 1])

    @pytest.mark.parametrize("k,angle", [(0, 0.0), (1, math.pi / 2), (2, math.pi)])
    def test_iterate_rotates_uniform_state(self, k, angle):
        problem = CountingProblem(1, k)
        assert problem.grover_angle == pytest.approx(angle)
        s = np.array([1, 1]) / math.sqrt(2)
        g = grover_iterate_matrix(problem)
        assert np.vdot(s, g @ s) == pytest.approx(math.cos(angle), abs=1e-12)
        if k != 1:
            # |s> is an eigenvector: G|s> = cos(angle) |s>
            np.testing.assert_allclose(g @ s, math.cos(angle) * s, atol=1e-12)
        else:
            np.testing.assert_allclose(np.abs(np.angle(np.linalg.eigvals(g))), [angle, angle], atol=1e-12)

    def test_k1_period_four(self):
        g = grover_iterate_matrix(CountingProblem(1, 1))
        np.testing.assert_allclose(np.linalg.matrix_power(g, 4), np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_signal_is_cosine(self, k):
        problem = CountingProblem(1, k, 12)
        expected = [math.cos(r * problem.grover_angle) for r in range(13)]
        np.testing.assert_allclose(reference(problem), expected, atol=1e-12)

    def test_controlled(self):
        u = np.array([[0, 1], [1, 0]])
        c = controlled(u)
        np.testing.assert_array_equal(c[:2, :2], np.eye(2))
        np.testing.assert_array_equal(c[2:, 2:], u)


class TestPulseLevel:
    @pytest.mark.parametrize("k", [0, 1, 2])
    @pytest.mark.parametrize("r", [0, 1, 3, 8])
    def test_program_matches_circuit(self, k, r):
        problem = CountingProblem(1, k)
        backend = GateBackend()
        sys = cp.formate()
        program = counting_pulse_program(problem, backend, r, j=sys.j(0, 1))
        u = cp.program_propagator(program, sys)
        assert infidelity(u, reference_circuit(problem, r)) < 1e-20

    @pytest.mark.parametrize("coupling_family", cp.COUPLING_FAMILIES)
    @pytest.mark.parametrize("single_family", ["naive", "BB1", "P4"])
    def test_families_agree_without_error(self, single_family, coupling_family):
        problem = CountingProblem(1, 1, 6)
        got = signals(run_counting(problem, GateBackend(single_family, coupling_family)))
        np.testing.assert_allclose(got, reference(problem), atol=1e-10)

    def test_gadget_rejects_odd_coupling(self):
        with pytest.raises(ValueError):
            diagonal_gadget(np.exp(1j * np.array([0, 0, 0, 0.3])))

    def test_gadget_for_identity_is_empty(self):
        assert diagonal_gadget([1, 1, 1, 1]) == []

    def test_amplitude_bounded(self):
        problem = CountingProblem(1, 1, 20)
        got = signals(run_counting(problem, GateBackend(error=ErrorModel(0.2), f_spread=0.1)))
        assert np.all(np.abs(got) <= 1 + 1e-12)

    def test_spectator_without_couplings_is_inert(self):
        problem = CountingProblem(1, 1, 6)
        sys = cp.alanine().with_couplings(H__Me=0.0, C__Me=0.0)
        got = signals(run_counting(problem, GateBackend(), sys))
        np.testing.assert_allclose(got, reference(problem), atol=1e-10)


class TestAnalysis:
    @pytest.mark.parametrize("k", [0, 1, 2])
    def test_eigenphase(self, k):
        problem = CountingProblem(1, k, 20)
        est = estimate_eigenphase(signals(run_counting(problem, GateBackend())))
        assert est == pytest.approx(problem.grover_angle, abs=1e-9)

    def test_decay_rate_of_known_envelope(self):
        r = np.arange(21)
        ideal = np.cos(r * math.pi / 2)
        assert envelope_decay_rate(ideal * np.exp(-0.07 * r), ideal) == pytest.approx(0.07)

    def test_damping(self):
        problem = CountingProblem(1, 1, 4)
        records = run_counting(problem, GateBackend(damping_rate=0.01))
        for rec, ref in zip(records, reference(problem)):
            assert rec.signal == pytest.approx(ref * math.exp(-0.01 * rec.duration), abs=1e-12)

    def test_bb1_costs_nine_times_naive(self):
        problem = CountingProblem(1, 1, 3)
        naive = run_counting(problem, GateBackend())
        bb1 = run_counting(problem, GateBackend("BB1", "BB1"))
        assert [b.duration / n.duration for b, n in zip(bb1, naive)] == pytest.approx([9.0] * 4)

    @pytest.mark.parametrize("f", [0.05, 0.1])
    def test_bb1_decays_slower(self, f):
        problem = CountingProblem(1, 1, 20)
        ideal = reference(problem)
        rate = {fam: envelope_decay_rate(signals(run_counting(problem, GateBackend(fam, error=ErrorModel(f),
                                                                                    f_spread=0.05))), ideal)
                for fam in ("naive", "BB1")}
        assert rate["naive"] > rate["BB1"]
        assert rate["naive"] > 0.05

    @pytest.mark.parametrize("k", [0, 2])
    def test_exact_cancellation_for_trivial_oracles(self, k):
        # h^-1 undoes h exactly, so only the preparation error survives
        problem = CountingProblem(1, k, 8)
        got = signals(run_counting(problem, GateBackend(error=ErrorModel(0.2))))
        np.testing.assert_allclose(np.abs(got), 0.9510565162951535, atol=1e-12)
