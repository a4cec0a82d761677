"""Shared pytest configuration for the curve proximity test suite."""


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "slow: full-size acceptance runs (deselect with -m \"not slow\")"
    )
