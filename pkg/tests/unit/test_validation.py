"""Unit tests for the numerical oracle suites."""

import numpy as np
import pytest


class TestSuites:
    """Run the oracle suites on a small number of instances."""

    @pytest.mark.parametrize("name", ["quadrature", "gradient", "woodbury", "update", "reduction"])
    def test_quick_suite_passes(self, name):
        from ligp.validation import run_suites

        (result,) = run_suites(quick=True, seed=42, names=[name])

        assert result.name == name
        assert result.passed, f"{name}: max error {result.max_error:.3e} >= {result.tolerance:.0e}"
        print(f"✅ {name}: max error {result.max_error:.3e} over {result.instances} instances")

    def test_sign_flipped_gradient_is_caught(self, monkeypatch):
        """A gradient with its sign flipped fails the finite-difference suite."""
        from ligp import criteria
        from ligp.validation import run_suites

        original = criteria.wimse_grad
        monkeypatch.setattr(criteria, "wimse_grad", lambda *args: -original(*args))
        (result,) = run_suites(quick=True, seed=42, names=["gradient"])

        assert not result.passed
        print(f"✅ Flipped gradient rejected: max error {result.max_error:.3e}")

    def test_failing_suite_reports_inf(self, monkeypatch):
        """A suite that raises is reported as failed rather than crashing the run."""
        from ligp import criteria
        from ligp.validation import run_suites

        def broken(*args):
            raise np.linalg.LinAlgError("injected")

        monkeypatch.setattr(criteria, "wimse", broken)
        (result,) = run_suites(quick=True, names=["quadrature"])
        assert result.max_error == float("inf")
        assert not result.passed

    @pytest.mark.slow
    def test_full_suites(self):
        from ligp.validation import run_suites

        results = run_suites(quick=False)
        names = [r.name for r in results]
        assert names == ["quadrature", "gradient", "woodbury", "update", "reduction"]
        assert all(r.passed for r in results)


class TestQuadratureGrid:
    def test_weights_integrate_volume(self):
        """Tensor Gauss-Legendre weights sum to the box volume."""
        from ligp.gp_core import Domain
        from ligp.validation import gauss_legendre_grid

        domain = Domain([0.0, -1.0], [2.0, 1.0])
        nodes, weights = gauss_legendre_grid(domain, 4, 3)

        assert nodes.shape == (144, 2)
        assert weights.sum() == pytest.approx(domain.volume())
        assert np.all([domain.contains(p) for p in nodes])
