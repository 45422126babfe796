"""Shared fixtures: the bundled dataset in its three shapes."""

import pytest

from dualsys import (
    CaptureTable,
    bundled_data_path,
    load_capture_table,
    reduce,
    summarize,
)


@pytest.fixture(scope="session")
def bundled_table():
    return load_capture_table(bundled_data_path())


@pytest.fixture(scope="session")
def bundled_reduced(bundled_table):
    return reduce(bundled_table)


@pytest.fixture(scope="session")
def bundled_stats(bundled_table):
    return summarize(bundled_table)


@pytest.fixture(scope="session")
def toy_table():
    """Five events, three-letter archive: small enough for exact checks."""
    return CaptureTable(
        m=3,
        counts_no_mention=(None, 1, 1, 0),
        counts_mention=(2, 1, 0, 0),
    )
