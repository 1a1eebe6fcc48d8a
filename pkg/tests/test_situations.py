import json

import pytest

from holoq.errors import PresetError
from holoq.judgments import replay
from holoq.situations import ScenarioPresets, audit_pool, run_situation

FAST = ScenarioPresets(seed=0, samples=80, contradiction_samples=500)


@pytest.mark.parametrize("k", range(1, 10))
def test_situation_passes(k, tmp_path):
    presets = ScenarioPresets(FAST.seed, FAST.samples, FAST.contradiction_samples, out_dir=str(tmp_path))
    report = run_situation(k, presets)
    assert report.passed, [c for c in report.checks if not c.passed]
    for path in report.artifacts:
        assert replay(json.loads(open(path).read())).reproduces
    json.dumps(report.to_dict())


def test_situation_nine_numbers():
    report = run_situation(9, FAST)
    details = {c.name: c.detail for c in report.checks}
    assert any(d.get("distance") == 0.5 for d in details.values())


def test_unsound_pool_is_rejected():
    with pytest.raises(PresetError):
        run_situation(1, ScenarioPresets(pool=("flip",)))
    flags = audit_pool(("flip", "dephase"), [1, 2], 0, sound_required=False)
    assert flags == {"flip": False, "dephase": True}


def test_unknown_preset_and_index():
    with pytest.raises(PresetError):
        run_situation(1, ScenarioPresets(pool=("oracle",)))
    with pytest.raises(PresetError):
        run_situation(10)
