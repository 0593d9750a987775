"""Shared helpers for the test suite."""

import numpy as np
import pytest

from pmukit import ChannelKind, SamplingSpec, new_channel_series

SPEC_30FPS = SamplingSpec(rate_fps=30.0, nominal_hz=60.0)


def make_series(values, kind=ChannelKind.FREQUENCY_HZ, spec=SPEC_30FPS, pmu_id="T1", **kwargs):
    return new_channel_series(kind, spec, np.asarray(values, dtype=float), pmu_id=pmu_id, **kwargs)


@pytest.fixture
def spec30():
    return SPEC_30FPS


# One pass/fail line per acceptance criterion, shown after the test run.
ACCEPTANCE_VERDICTS: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_VERDICTS:
        terminalreporter.write_sep("-", "acceptance criteria")
        for line in ACCEPTANCE_VERDICTS:
            terminalreporter.write_line(line)
