"""Shared fixtures: a synthetic telemonitoring-shaped csv and the
acceptance-line reporter hook.
"""

import numpy as np
import pytest

# Filled by test_acceptance.py; echoed after the run so the per-criterion
# verdict lines survive pytest's output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


TELE_HEADER = (
    "subject#,age,sex,test_time,motor_UPDRS,total_UPDRS,"
    "Jitter(%),Jitter(Abs),Jitter:RAP,Jitter:PPQ5,Jitter:DDP,"
    "Shimmer,Shimmer(dB),Shimmer:APQ3,Shimmer:APQ5,Shimmer:APQ11,"
    "Shimmer:DDA,NHR,HNR,RPDE,DFA,PPE"
)


def write_telemonitoring_csv(path, n_subjects=5, rows_per_subject=24, seed=7):
    """Small file with the UCI column layout and a learnable linear signal.

    Each subject's voice features sit at a slightly different location, so
    the subjects are genuinely shifted from each other.
    """
    rng = np.random.default_rng(seed)
    beta = np.linspace(0.1, 0.4, 16)
    lines = [TELE_HEADER]
    for subject in range(1, n_subjects + 1):
        voice = 0.3 * subject + rng.normal(0.0, 1.0, size=(rows_per_subject, 16))
        total = 20.0 + subject + voice @ beta + rng.normal(0.0, 0.5, rows_per_subject)
        for i in range(rows_per_subject):
            row = [
                subject,
                55 + subject,
                subject % 2,
                float(i),
                round(0.66 * total[i], 6),
                round(total[i], 6),
            ] + [round(v, 6) for v in voice[i]]
            lines.append(",".join(str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture(scope="session")
def tele_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("tele") / "telemonitoring.csv"
    return write_telemonitoring_csv(path)
