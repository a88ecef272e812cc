import os
import sys
import warnings

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from elasto_coinv import cauchy, synth  # noqa: E402
from elasto_coinv.config import load_config, resolve_config_path  # noqa: E402


def _prepared(name, **overrides):
    spec = synth.EXAMPLES[name]
    if overrides:
        from dataclasses import replace

        spec = replace(spec, **overrides)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        data, target, truth = synth.make_data(spec)
    field, reg, op = cauchy.complete(spec.material, data, spec.boundary_radius)
    return dict(spec=spec, data=data, target=target, truth=truth, field=field, reg=reg, op=op)


@pytest.fixture(scope="session")
def ex3():
    return _prepared("ex3_circle")


@pytest.fixture(scope="session")
def bean():
    return _prepared("ex1_bean_exterior")


@pytest.fixture(scope="session")
def prepared():
    return _prepared


@pytest.fixture(scope="session")
def example_config():
    def load(name, *overrides):
        return load_config(path=resolve_config_path(name), overrides=overrides)

    return load


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        ok, detail = mod.RESULTS[number]
        terminalreporter.write_line(f"CRITERION {number}: {'PASS' if ok else 'FAIL'} - {detail}")
