import numpy as np
import pytest

from vigil import svf
from vigil.errors import ValidationError
from vigil.fixtures import (
    ScriptEvent,
    StreamSpec,
    expected_chunk_labels,
    gen_fixtures,
    load_sources,
    load_truth,
    parse_script_file,
    render_stream,
)
from vigil.labels import ClassLabel


def test_event_majority_lands_in_expected_chunk(tmp_path):
    # a 10 s Falling event at t=20 in a 60 s stream dominates chunk index 2
    events = [ScriptEvent("cam1", 20.0, 10.0, ClassLabel.FALLING)]
    fixture_set = gen_fixtures(
        tmp_path, [StreamSpec("cam1", fps=10)], duration_s=60.0, events=events, seed=3
    )
    labels = [row["label"] for row in fixture_set.truth]
    assert len(labels) == 6
    assert labels[2] == int(ClassLabel.FALLING)
    assert all(l == int(ClassLabel.NORMAL) for i, l in enumerate(labels) if i != 2)


def test_empty_script_all_normal(tmp_path):
    fixture_set = gen_fixtures(
        tmp_path, [StreamSpec("cam1", fps=10), StreamSpec("cam2", fps=10)],
        duration_s=30.0, seed=1,
    )
    assert all(row["label"] == int(ClassLabel.NORMAL) for row in fixture_set.truth)
    assert all(row["normal_subtype"] is not None for row in fixture_set.truth)


def test_same_seed_byte_identical(tmp_path):
    events = [ScriptEvent("cam1", 5.0, 5.0, ClassLabel.STAGGERING)]
    a = render_stream(StreamSpec("cam1", fps=10), 20.0, events, seed=9)
    b = render_stream(StreamSpec("cam1", fps=10), 20.0, events, seed=9)
    c = render_stream(StreamSpec("cam1", fps=10), 20.0, events, seed=10)
    assert a == b
    assert a != c


def test_streams_differ_under_one_seed():
    a = render_stream(StreamSpec("cam1", fps=10), 10.0, (), seed=4)
    b = render_stream(StreamSpec("cam2", fps=10), 10.0, (), seed=4)
    assert a != b


def test_overlapping_events_rejected(tmp_path):
    events = [
        ScriptEvent("cam1", 10.0, 10.0, ClassLabel.FALLING),
        ScriptEvent("cam1", 15.0, 5.0, ClassLabel.CHEST_PAIN),
    ]
    with pytest.raises(ValidationError, match="overlapping"):
        gen_fixtures(tmp_path, [StreamSpec("cam1")], 60.0, events)


def test_event_past_stream_end_rejected(tmp_path):
    events = [ScriptEvent("cam1", 55.0, 10.0, ClassLabel.FALLING)]
    with pytest.raises(ValidationError, match="ends at"):
        gen_fixtures(tmp_path, [StreamSpec("cam1")], 60.0, events)


def test_event_on_unknown_stream_rejected(tmp_path):
    events = [ScriptEvent("ghost", 0.0, 5.0, ClassLabel.FALLING)]
    with pytest.raises(ValidationError, match="unknown stream"):
        gen_fixtures(tmp_path, [StreamSpec("cam1")], 60.0, events)


def test_frame_codes_realize_script(tmp_path):
    events = [ScriptEvent("cam1", 2.0, 3.0, ClassLabel.CHEST_PAIN, subtype=0)]
    data = render_stream(StreamSpec("cam1", fps=10), 10.0, events, seed=0)
    codes = svf.frame_codes(data)
    assert codes.shape == (100,)
    assert (codes[20:50] == int(ClassLabel.CHEST_PAIN)).all()
    assert (codes[:20] == int(ClassLabel.NORMAL)).all()
    assert (codes[50:] == int(ClassLabel.NORMAL)).all()


def test_expected_labels_majority_and_subtype():
    fps = 10
    codes = np.array([3] * 52 + [0] * 48, dtype=np.uint8)  # second window: 2+48 split
    subtypes = np.array([7] * 100, dtype=np.uint8)
    rows = expected_chunk_labels(codes, subtypes, fps, 5.0, "cam1")
    assert len(rows) == 2
    assert rows[0]["label"] == int(ClassLabel.NORMAL)
    assert rows[0]["normal_subtype"] == 7
    assert rows[1]["label"] == int(ClassLabel.FALLING)  # 48 of 50 frames
    assert rows[1]["normal_subtype"] is None
    assert rows[1]["path"] == "cam1/000000005000.svf"


def test_sources_round_trip(tmp_path):
    gen_fixtures(
        tmp_path, [StreamSpec("cam1", fps=12, width=20, height=18, client_id="res-9")],
        duration_s=10.0, seed=2,
    )
    (source,) = load_sources(tmp_path)
    assert source.stream_id == "cam1"
    assert source.fps == 12
    assert source.client_id == "res-9"
    header = svf.read_header((tmp_path / "cam1.svf").read_bytes())
    assert (header.width, header.height, header.fps, header.frame_count) == (20, 18, 12, 120)
    truth = load_truth(tmp_path)
    assert len(truth) == 1


def test_parse_script_file(tmp_path):
    path = tmp_path / "script.json"
    path.write_text(
        '[{"stream": "cam1", "start_s": 5, "duration_s": 10, "action_code": 0},'
        ' {"stream": "cam2", "start_s": 0, "duration_s": 3, "action_code": 2, "subtype": 0}]'
    )
    events = parse_script_file(path)
    assert len(events) == 2
    assert events[0].action_code == ClassLabel.FALLING
    assert events[1].stream_id == "cam2"

    bad = tmp_path / "bad.json"
    bad.write_text('[{"stream": "cam1"}]')
    with pytest.raises(ValidationError, match="bad script entry"):
        parse_script_file(bad)
