import numpy as np
import pytest

from pgtemper.config import config_from_dict


def desk_eggbox(**overrides) -> dict:
    """Small egg-box problem used by the slower end-to-end tests."""
    cfg = {
        "target": {"kind": "eggbox", "dim": 2, "beta_power": 100.0},
        "M": 5,
        "walkers": 8,
        "schedule": {"L": 10, "N": 20, "final_samples": 0},
        "trials": 1,
    }
    for k, v in overrides.items():
        if isinstance(v, dict) and isinstance(cfg.get(k), dict):
            cfg[k] = {**cfg[k], **v}
        else:
            cfg[k] = v
    return cfg


@pytest.fixture
def desk_cfg():
    return lambda **kw: config_from_dict(desk_eggbox(**kw))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE: list = []


@pytest.fixture
def criterion():
    """Record one acceptance line: ``criterion(n, passed, detail)``."""

    def record(n, passed, detail):
        line = f"criterion {n:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
