import json

import numpy as np
import pytest

from chanlearn import experiments as ex
from chanlearn.nn import mlp_regressor, param_count

TINY = {
    "classify-sweep": dict(
        per_class=8, epochs={"ffnn": 1, "rnn": 1, "cnn1d": 1}, r_values=(0.5, 1.0), lengths=(5,), repeats=2, n_estimators=3
    ),
    "confusion": dict(per_class=8, seq_len=8, epochs=2, batch_size=16),
    "memory-binning": dict(c_values=(0.3, 0.9), count=40, epochs=2),
    "complexity": dict(targets=(1000, 10000), per_class=8, epochs=1, repeats=2),
    "regression": dict(count=100, epochs=2, tiers=(1000,)),
    "forecast-markov": dict(count=40, epochs=2, repeats=2, mu_values=(0.2, 0.9)),
    "forecast-det": dict(n_train=60, n_test=20, epochs=2),
}


@pytest.fixture(scope="module", params=sorted(TINY))
def tiny_run(request):
    name = request.param
    cfg = ex.make_config(name, "desk", TINY[name])
    return name, cfg, ex.run_experiment(name, cfg)


def test_reports_are_reproducible(tiny_run):
    name, cfg, report = tiny_run
    again = ex.run_experiment(name, cfg)
    assert report.to_json() == again.to_json()
    assert report.experiment == name


def test_report_files(tiny_run, tmp_path):
    name, cfg, report = tiny_run
    report.write(tmp_path)
    doc = json.loads((tmp_path / "report.json").read_text())
    assert doc["experiment"] == name and "wall_time" not in json.dumps(doc)
    assert json.loads((tmp_path / "timing.json").read_text())["wall_time_s"] >= 0
    for curve in report.curves:
        lines = (tmp_path / f"{curve}.csv").read_text().splitlines()
        assert len(lines) == len(report.curves[curve]) + 1


def test_config_echo_round_trips(tiny_run):
    name, cfg, report = tiny_run
    cls, _ = ex.EXPERIMENTS[name]
    assert ex.config_from_dict(cls, report.config) == cfg


def test_sweep_report_contents():
    cfg = ex.make_config("classify-sweep", "desk", TINY["classify-sweep"])
    report = ex.run_experiment("classify-sweep", cfg)
    points = report.metrics["points"]
    assert set(points) == {"r=0.5", "r=1.0", "length=5"}
    for models in points.values():
        assert set(models) == {"forest", "ffnn", "rnn", "cnn1d"}
        for entry in models.values():
            assert len(entry["runs"]) == 2
            assert entry["mean"] == pytest.approx(np.mean(entry["runs"]))
    # repeats resample the data: the two repeats use different dataset seeds
    assert len(set(report.seeds["r=0.5"])) == 2


def test_confusion_report_contents():
    cfg = ex.make_config("confusion", "desk", TINY["confusion"])
    m = ex.run_experiment("confusion", cfg).metrics
    conf = np.array(m["confusion"])
    assert conf.shape == (5, 5) and conf.sum() == 5 * 2
    assert m["accuracy"] == pytest.approx(np.trace(conf) / conf.sum())
    assert m["accuracy"] == m["best_test_accuracy"]


def test_confusion_summary():
    conf = np.diag([10, 8, 7, 10, 10])
    conf[1, 2] = 2
    conf[2, 1] = 3
    conf[0, 1] = 1
    conf[0, 2] = 4
    s = ex.confusion_summary(conf)
    # largest single cell NM -> ML, largest two-way pair M <-> ML
    assert s["dominant_confusion"] == ["NM", "ML"] and s["dominant_confusion_count"] == 4
    assert s["dominant_pair"] == ["M", "ML"] and s["dominant_pair_count"] == 5
    assert s["row_recall"]["C"] == 1.0


def test_presets():
    desk = ex.SweepConfig.preset("desk")
    full = ex.SweepConfig.preset("paper")
    assert full.per_class == 10000 and full.epochs == {"ffnn": 400, "rnn": 800, "cnn1d": 400}
    assert desk.per_class == 2000 and desk.epochs["rnn"] == 160
    assert ex.ConfusionConfig.preset("desk").per_class * 5 == 10000
    assert ex.ConfusionConfig.preset("desk").epochs == 200
    det = ex.ForecastDetConfig.preset("paper", form="cos")
    assert (det.n_train, det.n_test, det.K) == (200000, 10000, 15)
    assert ex.ForecastDetConfig.preset("desk").n_train == 20000
    assert ex.make_config("forecast-det", "desk", {"form": "cos"}).K == 15
    assert ex.MemoryBinningConfig.preset("desk").count == 8000
    assert ex.ConfusionConfig.preset("desk").learning_rate == ex.DESK_LR
    assert ex.ConfusionConfig.preset("paper").learning_rate == 1e-3


def test_make_config_rejects_unknown_fields():
    with pytest.raises(ValueError):
        ex.make_config("regression", "desk", {"nonsense": 1})
    with pytest.raises(KeyError):
        ex.make_config("nope")


def test_regression_width_tiers():
    for target in (1000, 2000, 10000):
        h, h2 = ex.regression_widths(target)
        assert h2 == h // 2
        assert abs(param_count(mlp_regressor(5, 5, (h, h2))) - target) <= 0.1 * target
