import math

import numpy as np
import pytest

from oracles import tally_metrics
from rcr.data import Dataset
from rcr.losses import CostSpec
from rcr.metrics import CSV_COLUMNS, MetricsReport, aggregate, evaluate, evaluate_outputs, format_value, mse, stderr
from rcr.models import ModelParams, ModelSpec, RcRPair


def report(**kw):
    base = dict(rcr_loss=1.0, rej=0.5, al=1.0, rl=1.0, ar=0.0, ra=0.0, n_total=2, n_accepted=1, n_rejected=1)
    base.update(kw)
    return MetricsReport(**base)


class TestEvaluateOutputs:
    def test_two_example_arithmetic(self):
        m = evaluate_outputs([1, 2], [1, 4], [1, -1], 1.0)
        assert (m.rcr_loss, m.rej, m.al, m.rl, m.ar, m.ra) == (0.5, 0.5, 0.0, 4.0, 0.0, 0.0)
        assert (m.n_total, m.n_accepted, m.n_rejected) == (2, 1, 1)

    def test_all_accepted(self):
        h, y = np.array([1.0, 2.0, 3.0]), np.array([1.5, 2.0, 1.0])
        m = evaluate_outputs(h, y, np.ones(3), 1.0)
        assert m.rej == 0
        assert m.rcr_loss == m.al == pytest.approx(mse(h, y))
        assert m.rl is None

    def test_zero_boundary_rejects(self):
        m = evaluate_outputs([0.0], [0.0], [0.0], 2.0)
        assert m.rej == 1.0 and m.rcr_loss == 2.0

    def test_per_example_costs(self):
        m = evaluate_outputs([0, 0], [1, 3], [-1, -1], np.array([0.5, 2.0]))
        assert m.rcr_loss == pytest.approx(1.25)

    def test_matches_tally(self):
        rng = np.random.default_rng(12)
        for _ in range(20):
            n = 200
            h, y = rng.normal(size=n), rng.normal(size=n)
            r = rng.normal(size=n)
            c = rng.uniform(0, 3, n)
            m = evaluate_outputs(h, y, r, c)
            ref = tally_metrics(h.tolist(), y.tolist(), r.tolist(), c.tolist())
            for k in ("rcr_loss", "rej", "al", "rl", "ar", "ra"):
                assert getattr(m, k) == pytest.approx(ref[k], rel=1e-12, abs=1e-15), k
            assert m.n_accepted == ref["n_accepted"]

    def test_decomposition(self):
        rng = np.random.default_rng(4)
        h, y, r = rng.normal(size=(3, 500))
        m = evaluate_outputs(h, y, r, 1.5)
        acc = m.n_accepted / m.n_total
        assert m.rcr_loss == pytest.approx(acc * m.al + m.rej * 1.5)

    def test_errors(self):
        with pytest.raises(ValueError, match="empty"):
            evaluate_outputs([], [], [], 1.0)
        with pytest.raises(ValueError):
            evaluate_outputs([1], [1], [1], -1.0)
        with pytest.raises(ValueError):
            evaluate_outputs([1, 2], [1], [1], 1.0)

    def test_evaluate_with_pair(self):
        spec = ModelSpec("linear", 1)
        h = ModelParams(spec, [np.array([[1.0]])], [np.array([0.0])])
        r = ModelParams(spec, [np.array([[-1.0]])], [np.array([0.5])])
        test = Dataset(np.array([[0.0], [1.0]]), np.array([0.0, 3.0]))
        m = evaluate(RcRPair(h, r), test, CostSpec(constant=2.0))
        # x=0: accepted, exact; x=1: rejected, pays 2
        assert m.rcr_loss == 1.0 and m.cost == "2"


class TestReport:
    def test_csv_row(self):
        row = report(cost="3").csv_row()
        assert len(row) == len(CSV_COLUMNS)
        assert row[0] == "3" and row[1] == ""

    def test_format_value(self):
        assert format_value(None) == ""
        assert float(format_value(0.1 + 0.2)) == 0.1 + 0.2

    def test_json(self):
        assert '"sup": 2.5' in report().with_sup(2.5).to_json()


class TestAggregate:
    def test_singleton(self):
        s = aggregate([report(rcr_loss=2.0)])["rcr_loss"]
        assert (s.mean, s.std, s.count) == (2.0, 0.0, 1)

    def test_two_points(self):
        s = aggregate([report(rcr_loss=2.0), report(rcr_loss=4.0)])["rcr_loss"]
        assert s.mean == 3.0
        assert s.std == pytest.approx(math.sqrt(2))

    def test_drops_absent(self):
        s = aggregate([report(rl=None), report(rl=3.0)])["rl"]
        assert (s.mean, s.count) == (3.0, 1)
        assert aggregate([report(sup=None)])["sup"].count == 0

    def test_recomputation(self):
        rng = np.random.default_rng(8)
        vals = rng.uniform(1, 5, 10)
        s = aggregate([report(al=float(v)) for v in vals])["al"]
        mean = sum(vals) / 10
        var = sum((v - mean) ** 2 for v in vals) / 9
        assert s.mean == pytest.approx(mean, rel=1e-12)
        assert s.std == pytest.approx(math.sqrt(var), rel=1e-12)

    def test_empty(self):
        with pytest.raises(ValueError):
            aggregate([])

    def test_stderr(self):
        assert stderr([2.0, 4.0]) == pytest.approx(1.0)
        assert stderr([1.0]) == 0.0
