"""Statevector simulation: transforms, queries, algorithm pipelines, rank."""

import math

import numpy as np
import pytest

from qinterp.errors import BudgetExceededError, ValidationError
from qinterp.fields import Field
from qinterp.qsim import (
    StateVector,
    fourier_matrix,
    fourier_on_registers,
    good_representatives,
    pgm_success_formula,
    phase_query,
    run_interpolation,
    run_pgm,
    run_superposed_rep,
    span_rank,
    standard_query,
)
from qinterp.zmap import ProblemParams, cached_census, tuple_to_index

F2 = Field(2)
F3 = Field(3)
F4 = Field(2, 2)
F5 = Field(5)
F7 = Field(7)
F9 = Field(3, 2)


def params(field, d, k):
    return ProblemParams(field, d=d, k=k)


def basis_state(field, m, tup):
    amps = np.zeros((field.q,) * m, dtype=complex)
    amps[tup] = 1.0
    return StateVector(field, amps)


# -- transforms ---------------------------------------------------------------


@pytest.mark.parametrize("field", [F2, F3, F4, F5, F9], ids=lambda f: f"q{f.q}")
def test_fourier_matrix_unitary(field):
    F = fourier_matrix(field)
    assert np.abs(F @ F.conj().T - np.eye(field.q)).max() < 1e-12


def test_fourier_on_zero_gives_uniform():
    st = basis_state(F5, 1, (0,))
    out = fourier_on_registers(st, [0])
    assert np.allclose(out.amps, 1 / math.sqrt(5), atol=1e-12)


def test_fourier_round_trip_identity():
    rng = np.random.default_rng(0)
    amps = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    state = StateVector(F3, amps / np.linalg.norm(amps))
    back = fourier_on_registers(fourier_on_registers(state, [0, 1]), [0, 1],
                                inverse=True)
    assert np.abs(back.amps - state.amps).max() < 1e-12


def test_fourier_f4_entries_half():
    F = fourier_matrix(F4)
    assert np.allclose(np.abs(F), 0.5, atol=1e-12)
    assert np.abs(F.imag).max() < 1e-12  # characters are +-1 for p = 2


def test_fourier_register_validation():
    st = basis_state(F3, 2, (0, 0))
    with pytest.raises(ValidationError):
        fourier_on_registers(st, [2])
    with pytest.raises(ValidationError):
        fourier_on_registers(st, [0, 0])


# -- queries ------------------------------------------------------------------


def test_queries_with_zero_polynomial_are_identity():
    rng = np.random.default_rng(1)
    amps = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    st = StateVector(F3, amps / np.linalg.norm(amps))
    c = (0, 0)
    assert np.abs(phase_query(st, c).amps - st.amps).max() < 1e-12
    assert np.abs(standard_query(st, c).amps - st.amps).max() < 1e-12


def test_phase_query_basis_example():
    # f(x) = x over F_3, basis |x=1, y=2>: phase e(2*1) = exp(4 pi i / 3)
    st = basis_state(F3, 2, (1, 2))
    out = phase_query(st, (0, 1))
    expect = np.exp(4j * np.pi / 3)
    assert abs(out.amps[1, 2] - expect) < 1e-12


def test_standard_query_shifts_y():
    # f(x) = x + 1 over F_3: |x, y> -> |x, y + x + 1>
    st = basis_state(F3, 2, (2, 1))
    out = standard_query(st, (1, 1))
    assert abs(out.amps[2, (1 + 2 + 1) % 3] - 1) < 1e-12


def _operator_of(apply_fn, field, k):
    dim = field.q ** (2 * k)
    op = np.zeros((dim, dim), dtype=complex)
    shape = (field.q,) * (2 * k)
    for col in range(dim):
        v = np.zeros(dim, dtype=complex)
        v[col] = 1.0
        op[:, col] = apply_fn(StateVector(field, v.reshape(shape))).amps.reshape(-1)
    return op


@pytest.mark.parametrize("field", [F2, F3, F4, F5], ids=lambda f: f"q{f.q}")
def test_phase_equals_fourier_conjugated_standard(field):
    rng = np.random.default_rng(field.q)
    d = 2 if field.q > 2 else 1
    c = tuple(int(v) for v in rng.integers(0, field.q, d + 1))
    S = _operator_of(lambda s: standard_query(s, c), field, 1)
    P = _operator_of(lambda s: phase_query(s, c), field, 1)
    Fm = fourier_matrix(field)
    Fy = np.kron(np.eye(field.q), Fm)
    assert np.abs(P - Fy @ S @ Fy.conj().T).max() < 1e-9


def test_query_operators_unitary():
    c = (1, 2, 0)
    for fn in (lambda s: standard_query(s, c), lambda s: phase_query(s, c)):
        op = _operator_of(fn, F3, 1)
        assert np.abs(op @ op.conj().T - np.eye(9)).max() < 1e-9


# -- algorithm pipelines --------------------------------------------------------


def test_run_interpolation_success_values():
    r = run_interpolation(params(F3, 1, 1), (0, 1), scope="all")
    assert abs(r.success_probability - 7 / 9) < 1e-9
    r = run_interpolation(params(F3, 1, 1), (0, 1), scope="good")
    assert abs(r.success_probability - 6 / 9) < 1e-9
    r = run_interpolation(params(F5, 3, 2), (1, 2, 3, 4), scope="good")
    assert abs(r.success_probability - 0.256) < 1e-9


def test_run_interpolation_matches_census_for_random_c():
    rng = np.random.default_rng(17)
    for field, d, k in ((F3, 1, 1), (F5, 1, 1), (F5, 3, 2), (F7, 2, 2)):
        p = params(field, d, k)
        expect = float(cached_census(p).success_probability("good"))
        for _ in range(3):
            c = tuple(int(v) for v in rng.integers(0, field.q, d + 1))
            r = run_interpolation(p, c, scope="good")
            assert abs(r.success_probability - expect) < 1e-9
            assert abs(r.distribution.sum() - 1) < 1e-9


def test_run_interpolation_c_independent():
    p = params(F3, 1, 1)
    succ = [run_interpolation(p, (a, b), scope="all").success_probability
            for a in range(3) for b in range(3)]
    assert max(succ) - min(succ) < 1e-12


def test_representative_sources_agree():
    p = params(F5, 3, 2)
    c = (4, 0, 2, 1)
    via_prony = run_interpolation(p, c, scope="good", rep_source="prony")
    via_census = run_interpolation(p, c, scope="good", rep_source="census")
    assert abs(via_prony.success_probability - via_census.success_probability) < 1e-12
    reps = good_representatives(p, "prony")
    assert sorted(reps.tolist()) != []  # one id per good fiber
    assert len(reps) == cached_census(p).good_range_size


def test_full_query_count_reaches_certainty():
    r = run_interpolation(params(F3, 1, 2), (2, 1), scope="all")
    assert abs(r.success_probability - 1.0) < 1e-9


def test_run_pgm_matches_formula_and_bound():
    p = params(F3, 1, 1)
    r = run_pgm(p, (1, 2))
    formula = pgm_success_formula(p)
    assert abs(r.success_probability - formula) < 1e-9
    assert abs(formula - (math.sqrt(3) + 6) ** 2 / 81) < 1e-12
    optimum = float(cached_census(p).success_probability("all"))
    assert r.success_probability <= optimum + 1e-9

    p5 = params(F5, 3, 2)
    r5 = run_pgm(p5, (0, 1, 2, 3))
    assert abs(r5.success_probability - pgm_success_formula(p5)) < 1e-9


def test_run_superposed_rep_matches_good_census():
    p = params(F7, 2, 2)
    expect = float(cached_census(p).success_probability("good"))
    r = run_superposed_rep(p, (1, 2, 3))
    assert abs(r.success_probability - expect) < 1e-9
    # same figure the representative algorithm reports at good scope
    r2 = run_interpolation(p, (1, 2, 3), scope="good")
    assert abs(r.success_probability - r2.success_probability) < 1e-9


@pytest.mark.parametrize("field", [F7, Field(11), Field(13)],
                         ids=lambda f: f"q{f.q}")
def test_superposed_success_meets_stated_bound(field):
    # success >= 1 - (d+1)^(2k)/q whenever that bound is positive
    p = params(field, 2, 2)
    r = run_superposed_rep(p, (0, 1, 2))
    bound = 1 - (2 + 1) ** 4 / field.q
    if bound > 0:
        assert r.success_probability >= bound - 1e-9
    else:
        assert r.success_probability >= 0


def test_superposed_requires_even_d():
    with pytest.raises(ValidationError):
        run_superposed_rep(params(F5, 3, 2), (0, 0, 0, 0))


def test_measurement_distribution_shape():
    p = params(F3, 1, 1)
    r = run_interpolation(p, (2, 1), scope="all")
    assert r.distribution.shape == (9,)
    assert abs(r.probability_of((2, 1), 3) - r.success_probability) < 1e-15
    assert np.all(r.distribution >= -1e-12)
    assert np.all(r.distribution <= 1 + 1e-12)
    assert abs(r.distribution.sum() - 1) < 1e-9


def test_every_variant_respects_the_optimum():
    p = params(F7, 2, 2)
    optimum = float(cached_census(p).success_probability("all"))
    c = (3, 1, 4)
    for sim in (run_interpolation(p, c, scope="good"),
                run_interpolation(p, c, scope="all"),
                run_pgm(p, c),
                run_superposed_rep(p, c)):
        assert sim.success_probability <= optimum + 1e-9


# -- rank bound -----------------------------------------------------------------


def test_span_rank_examples():
    p3 = params(F3, 1, 1)
    rank = span_rank(p3, 1)
    assert rank <= cached_census(p3).range_size == 7
    assert span_rank(p3, 0) == 1
    p5 = params(F5, 3, 2)
    assert span_rank(p5, 2) <= cached_census(p5).range_size


def test_span_rank_validation():
    with pytest.raises(ValidationError):
        span_rank(params(F3, 1, 1), -1)


# -- budgets and export ------------------------------------------------------------


def test_amp_budget_enforced():
    with pytest.raises(BudgetExceededError):
        run_interpolation(params(F5, 3, 2), (0, 0, 0, 0), amp_cap=100)
    with pytest.raises(BudgetExceededError):
        run_pgm(params(F5, 3, 2), (0, 0, 0, 0), amp_cap=100)


def test_state_json_export():
    st = basis_state(F3, 2, (1, 2))
    doc = st.to_json_dict()
    assert doc["q"] == 3 and doc["shape"] == [3, 3]
    assert doc["amplitudes"] == [[5, 1.0, 0.0]]  # flat index 1*3+2
    assert tuple_to_index((1, 2), 3) == 5
