"""Shared fixtures: synthetic Cornell-format data, a prebuilt cache, and
the acceptance-criteria summary printed at the end of the run."""

import numpy as np
import pytest
import torch

from graspgen.dataset import generate_synthetic_cgd, load_cache, write_cache

torch.set_num_threads(1)

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def acceptance():
    """Recorder used by test_acceptance.py; results print in the summary."""

    def record(criterion, name, status, detail=""):
        ACCEPTANCE_RESULTS.append((str(criterion), name, status, detail))

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    def key(item):
        head = item[0]
        digits = "".join(ch for ch in head if ch.isdigit())
        return (int(digits) if digits else 0, head)
    for criterion, name, status, detail in sorted(ACCEPTANCE_RESULTS, key=key):
        line = f"ACCEPTANCE {criterion:>2} [{status}] {name}"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def raw_dir(tmp_path_factory):
    """Synthetic Cornell-format raw tree: 8 scenes, nested subfolders."""
    out = tmp_path_factory.mktemp("raw")
    generate_synthetic_cgd(out, n_scenes=8, seed=1)
    return out


@pytest.fixture(scope="session")
def cache_dir(tmp_path_factory, raw_dir):
    """Preprocessed cache built from the synthetic raw tree."""
    out = tmp_path_factory.mktemp("cache")
    write_cache(raw_dir, out, shape=(240, 320))
    return out


@pytest.fixture(scope="session")
def scenes(cache_dir):
    return load_cache(cache_dir)


@pytest.fixture
def rng():
    return np.random.default_rng(7)
