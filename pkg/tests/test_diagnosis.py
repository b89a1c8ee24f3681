import time

import numpy as np
import pytest

from clinicdx.core.exceptions import Infeasible, InstanceTooLarge
from clinicdx.core.models import ChangeVector, ObservedAppointment, PlannedAppointment
from clinicdx.analysis.brute_force import brute_force_diagnose
from clinicdx.analysis.diagnosis import (
    diagnose, is_on_schedule, revise_arrival, revise_duration, simulate_revised
)
from clinicdx.analysis.synthetic import (
    generate_on_plan_day, generate_provider_day, generate_single_late_day,
    generate_single_overrun_day
)

from conftest import make_day


def test_revise_arrival():
    planned = PlannedAppointment(540, 30)
    assert revise_arrival(planned, ObservedAppointment(555, 555, 30), 1) == 540
    assert revise_arrival(planned, ObservedAppointment(555, 555, 30), 0) == 555
    assert revise_arrival(planned, ObservedAppointment(540, 540, 30), 1) == 540


def test_revise_duration():
    planned = PlannedAppointment(540, 30)
    assert revise_duration(planned, ObservedAppointment(540, 540, 45), 1) == 30
    assert revise_duration(planned, ObservedAppointment(540, 540, 45), 0) == 45
    assert revise_duration(planned, ObservedAppointment(540, 540, 20), 1) == 30


def test_simulate_identity_on_time_day(on_time_day):
    revised = simulate_revised(on_time_day, ChangeVector.zeros(3))
    assert revised.revised_start == on_time_day.actual_starts
    assert revised.revised_duration == on_time_day.actual_durations


def test_simulate_flip_late_first_patient(late_first_patient_day):
    revised = simulate_revised(late_first_patient_day, ChangeVector((1, 0), (0, 0)))
    assert revised.revised_arrival == (540, 570)
    assert revised.revised_duration == (30, 30)
    assert revised.revised_start == (540, 570)


def test_simulate_all_flips_reproduces_plan(late_first_patient_day):
    revised = simulate_revised(late_first_patient_day, ChangeVector.ones(2))
    assert revised.revised_start == (540, 570)
    assert revised.revised_duration == (30, 30)


def test_simulate_rejects_wrong_length(on_time_day):
    with pytest.raises(ValueError):
        simulate_revised(on_time_day, ChangeVector.zeros(2))


def test_is_on_schedule_symmetric_tolerance():
    day = make_day([540], [30], [540], [540], [45])
    long_revised = simulate_revised(day, ChangeVector.zeros(1))
    assert is_on_schedule(day, long_revised, 0) == [False]
    assert is_on_schedule(day, long_revised, 15) == [True]

    short = make_day([540], [30], [540], [540], [20])
    short_revised = simulate_revised(short, ChangeVector.zeros(1))
    assert is_on_schedule(short, short_revised, 5) == [False]

    exact = simulate_revised(make_day([540], [30], [540], [540], [30]), ChangeVector.zeros(1))
    assert is_on_schedule(make_day([540], [30], [540], [540], [30]), exact, 0) == [True]


# ===== diagnose =====

def test_diagnose_on_time_day(on_time_day):
    diagnosis = diagnose(on_time_day, 0)
    assert diagnosis.objective == 0
    assert diagnosis.changes == ChangeVector.zeros(3)


def test_diagnose_late_first_patient(late_first_patient_day):
    diagnosis = diagnose(late_first_patient_day, 0)
    assert diagnosis.changes.delta_ap == (1, 0)
    assert diagnosis.changes.delta_ae == (0, 0)
    assert diagnosis.objective == 1
    assert diagnosis.epsilon == 0


def test_diagnose_overrun(overrun_day):
    diagnosis = diagnose(overrun_day, 0)
    assert diagnosis.changes.delta_ap == (0, 0)
    assert diagnosis.changes.delta_ae == (1, 0)
    assert diagnosis.objective == 1


def test_diagnose_inconsistent_plan_is_infeasible(inconsistent_plan_day):
    with pytest.raises(Infeasible) as excinfo:
        diagnose(inconsistent_plan_day, 0)
    assert excinfo.value.index == 1


def test_diagnose_rejects_negative_epsilon(on_time_day):
    with pytest.raises(ValueError):
        diagnose(on_time_day, -1)


def test_early_first_patient_needs_arrival_flip():
    # Пациент пришел на 10 минут раньше и был принят сразу
    day = make_day([540], [30], [530], [530], [30])
    diagnosis = diagnose(day, 0)
    assert diagnosis.changes == ChangeVector((1,), (0,))
    assert diagnose(day, 10).objective == 0


def test_tie_break_prefers_duration_flip():
    # Конец 577 при плане 570 и допуске 5: хватает либо δAp_0 (572), либо δAe_0 (575)
    day = make_day([540], [30], [545], [545], [32])
    diagnosis = diagnose(day, 5)
    assert diagnosis.objective == 1
    assert diagnosis.changes == ChangeVector((0,), (1,))
    assert brute_force_diagnose(day, 5).changes == diagnosis.changes


# ===== brute force =====

@pytest.mark.parametrize("fixture_name", ["on_time_day", "late_first_patient_day", "overrun_day"])
def test_brute_force_matches_examples(request, fixture_name):
    day = request.getfixturevalue(fixture_name)
    expected = diagnose(day, 0)
    actual = brute_force_diagnose(day, 0)
    assert actual.changes == expected.changes
    assert actual.objective == expected.objective
    assert actual.revised == expected.revised


def test_brute_force_single_late_patient():
    day = make_day([540], [30], [550], [550], [30])
    assert brute_force_diagnose(day, 0).changes == ChangeVector((1,), (0,))


def test_brute_force_infeasible_index(inconsistent_plan_day):
    with pytest.raises(Infeasible) as excinfo:
        brute_force_diagnose(inconsistent_plan_day, 0)
    assert excinfo.value.index == 1


def test_brute_force_too_large():
    rng = np.random.default_rng(0)
    day = generate_on_plan_day(rng, 13)
    with pytest.raises(InstanceTooLarge):
        brute_force_diagnose(day, 0)


@pytest.mark.parametrize("epsilon", [0, 5, 15])
def test_search_matches_brute_force_on_random_days(epsilon):
    rng = np.random.default_rng(1000 + epsilon)
    for _ in range(350):
        day = generate_provider_day(rng, int(rng.integers(1, 9)))

        try:
            expected = brute_force_diagnose(day, epsilon)
        except Infeasible as e:
            with pytest.raises(Infeasible) as excinfo:
                diagnose(day, epsilon)
            assert excinfo.value.index == e.index
            continue

        actual = diagnose(day, epsilon)
        assert actual.objective == expected.objective
        assert actual.changes == expected.changes


# ===== properties =====

def test_identity_on_plan_days():
    rng = np.random.default_rng(17)
    for _ in range(200):
        day = generate_on_plan_day(rng, int(rng.integers(1, 17)))
        diagnosis = diagnose(day, 0)
        assert diagnosis.objective == 0
        assert diagnosis.revised.revised_start == day.actual_starts
        assert diagnosis.revised.revised_duration == day.actual_durations


def test_single_late_patient_recovered():
    rng = np.random.default_rng(23)
    for _ in range(100):
        n = int(rng.integers(1, 17))
        day, k = generate_single_late_day(rng, n)
        diagnosis = diagnose(day, 0)

        expected_ap = tuple(1 if i == k else 0 for i in range(n))
        assert diagnosis.changes == ChangeVector(expected_ap, (0,) * n)


def test_single_overrun_recovered():
    rng = np.random.default_rng(29)
    for _ in range(100):
        n = int(rng.integers(1, 17))
        day, k = generate_single_overrun_day(rng, n)
        diagnosis = diagnose(day, 0)

        expected_ae = tuple(1 if i == k else 0 for i in range(n))
        assert diagnosis.changes == ChangeVector((0,) * n, expected_ae)


def test_consistent_plan_is_always_feasible():
    rng = np.random.default_rng(31)
    for _ in range(300):
        day = generate_provider_day(rng, int(rng.integers(1, 17)))

        all_flips = simulate_revised(day, ChangeVector.ones(len(day)))
        assert all(is_on_schedule(day, all_flips, 0))

        diagnosis = diagnose(day, 0)
        assert all(is_on_schedule(day, diagnosis.revised, 0))
        assert diagnosis.objective == diagnosis.changes.objective


def test_zero_objective_iff_already_on_schedule():
    rng = np.random.default_rng(37)
    for _ in range(300):
        day = generate_provider_day(rng, int(rng.integers(1, 10)))
        unchanged = simulate_revised(day, ChangeVector.zeros(len(day)))
        on_schedule = all(is_on_schedule(day, unchanged, 5))
        assert (diagnose(day, 5).objective == 0) == on_schedule


def test_revised_ends_within_window():
    rng = np.random.default_rng(41)
    for epsilon in (0, 5, 15):
        for _ in range(100):
            day = generate_provider_day(rng, int(rng.integers(1, 12)))
            diagnosis = diagnose(day, epsilon)
            for (planned, _), end in zip(day.appointments, diagnosis.revised.revised_end):
                assert planned.planned_end - epsilon <= end <= planned.planned_end + epsilon


def test_diagnosis_is_deterministic():
    rng = np.random.default_rng(43)
    day = generate_provider_day(rng, 12, late_prob=0.4, overrun_prob=0.4)
    assert diagnose(day, 0) == diagnose(day, 0)


def test_sixteen_appointment_day_is_fast():
    rng = np.random.default_rng(47)
    day = generate_provider_day(rng, 16, late_prob=0.4, overrun_prob=0.4, underrun_prob=0.2)

    started = time.perf_counter()
    diagnosis = diagnose(day, 0)
    elapsed = time.perf_counter() - started

    assert all(is_on_schedule(day, diagnosis.revised, 0))
    assert elapsed < 1.0
