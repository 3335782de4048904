"""Shared pytest fixtures and configuration for all tests."""

import numpy as np
import pytest

from tests.utils.performance import PerformanceMetrics


# Register custom markers
def pytest_configure(config):
    """Register custom pytest markers."""
    config.addinivalue_line("markers", "performance: mark test as a performance test (can be slow)")
    config.addinivalue_line(
        "markers", "slow: mark test as slow running (deselect with '-m \"not slow\"')"
    )
    config.addinivalue_line("markers", "e2e: mark test as end-to-end test")


@pytest.fixture
def rng():
    """Seeded generator so every test sees the same draws."""
    return np.random.default_rng(20250101)


@pytest.fixture
def small_state(rng):
    """Induced GP state on 40 points in [0, 1]^2 with 4 inducing points."""
    from ligp.gp_core import KernelConfig, build_state

    x_n = rng.random((40, 2))
    y_n = np.sin(4.0 * x_n[:, 0]) + np.cos(3.0 * x_n[:, 1])
    x_bar = np.vstack([[0.5, 0.5], rng.random((3, 2))])
    return build_state(x_n, y_n, x_bar, KernelConfig(theta=0.05, g=1e-4))


@pytest.fixture
def herbie_data():
    """Small Herbie's tooth training and testing sets."""
    from ligp.bench import herbie_design, herbies_tooth

    X = herbie_design(600, seed=7)
    Xt = np.array([[0.3, 0.6], [-1.1, 0.2], [1.5, -0.4], [0.0, 0.0], [-0.7, -1.3]])
    return X, herbies_tooth(X), Xt, herbies_tooth(Xt)


@pytest.fixture
def performance_metrics():
    """Provide a PerformanceMetrics instance for tests."""
    return PerformanceMetrics()


@pytest.fixture(scope="session")
def performance_report(request):
    """Collect performance metrics across all tests and report at end."""
    metrics = PerformanceMetrics()

    yield metrics

    # Print summary at end of test session
    if metrics.timings:
        print("\n" + "=" * 70)
        print("PERFORMANCE TEST SUMMARY")
        print("=" * 70)
        print(metrics.summary())
