import json

import numpy as np
import pytest
from pydantic import ValidationError

from clinicdx.analysis.diagnosis import diagnose
from clinicdx.analysis.gantt_export import export_gantt, gantt_filename, gantt_to_json, parse_gantt
from clinicdx.analysis.synthetic import generate_provider_day

from conftest import make_day


def test_on_time_day_intervals_identical(on_time_day):
    document = export_gantt(on_time_day, diagnose(on_time_day, 0))
    for item in document.appointments:
        assert item.planned_start == item.observed_start == item.revised_start
        assert item.planned_end == item.observed_end == item.revised_end
        assert not item.flip_arrival and not item.flip_duration


def test_late_patient_revised_equals_plan(late_first_patient_day):
    document = export_gantt(late_first_patient_day, diagnose(late_first_patient_day, 0))

    assert document.objective == 1
    assert [a.flip_arrival for a in document.appointments] == [True, False]
    for item in document.appointments:
        assert (item.revised_start, item.revised_end) == (item.planned_start, item.planned_end)

    first = document.appointments[0]
    assert (first.arrival, first.observed_start, first.observed_end) == (555, 555, 585)
    assert first.revised_arrival == 540


def test_json_field_names(late_first_patient_day):
    payload = json.loads(gantt_to_json(export_gantt(late_first_patient_day, diagnose(late_first_patient_day, 0))))

    assert set(payload) == {"provider_id", "date", "epsilon", "objective", "appointments"}
    assert payload["date"] == "2017-03-27"
    assert set(payload["appointments"][0]) == {
        "index", "planned_start", "planned_end", "arrival", "observed_start", "observed_end",
        "revised_arrival", "revised_start", "revised_end", "flip_arrival", "flip_duration"
    }


def test_round_trip_on_random_days():
    rng = np.random.default_rng(8)
    for _ in range(30):
        day = generate_provider_day(rng, int(rng.integers(1, 12)))
        document = export_gantt(day, diagnose(day, 5))
        assert parse_gantt(gantt_to_json(document)) == document


def test_parse_rejects_malformed_document():
    with pytest.raises(ValidationError):
        parse_gantt('{"provider_id": "P1", "date": "2017-03-27"}')


def test_filename_is_safe():
    day = make_day([540], [30], [540], [540], [30], provider_id="Dr. A/B")
    assert gantt_filename(day) == "Dr.%20A%2FB_2017-03-27.json"


@pytest.mark.parametrize("ids", [
    ("A/B", "A_B"),
    ("A B", "A%20B"),
    ("Иванов", "_"),
])
def test_filename_distinguishes_providers(ids):
    names = {gantt_filename(make_day([540], [30], [540], [540], [30], provider_id=i)) for i in ids}
    assert len(names) == len(ids)
    assert all("/" not in name for name in names)
