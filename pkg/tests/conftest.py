import json

import numpy as np
import pytest


@pytest.fixture
def tiny_csv(tmp_path):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(80, 2))
    y = 1.5 * x[:, 0] - x[:, 1] + rng.normal(0, np.where(x[:, 0] > 0, 2.0, 0.3))
    path = tmp_path / "tiny.csv"
    lines = ["a,b,y"] + [f"{a!r},{b!r},{t!r}" for (a, b), t in zip(x.tolist(), y.tolist())]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def tiny_config(tmp_path, tiny_csv):
    """Factory writing a small, fast experiment config and returning its path."""

    def make(**overrides):
        doc = {
            "mode": "experiment",
            "dataset": {"name": "tiny", "csv": tiny_csv.name, "target": "y"},
            "model_h": {"kind": "mlp", "hidden_dims": [4]},
            "model_r": {"kind": "linear"},
            "train": {"lr_grid": [0.01], "epochs": 3, "slow_start_epochs": 1, "batch_size": 16},
            "costs": [1.0, 2.0],
            "loss_kinds": ["mae"],
            "repetitions": 2,
            "master_seed": 5,
            "output_dir": "out",
            "figures": False,
        }
        doc.update(overrides)
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(doc))
        return path

    return make


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion_line():
    """Record one PASS/FAIL line; all lines are echoed in the terminal summary."""

    def record(number, ok, text):
        line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {text}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
