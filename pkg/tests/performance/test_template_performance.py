"""Performance tests for local inducing point designs and neighborhood queries."""

import time

import numpy as np
import pytest

from tests.utils.performance import PerformanceConstraints, PerformanceMetrics


@pytest.fixture(scope="module")
def herbie_10k():
    from ligp.bench import herbie_design, herbies_tooth

    X = herbie_design(10000, seed=11)
    Xt = np.random.default_rng(12).uniform(-1.8, 1.8, size=(20, 2))
    return X, herbies_tooth(X), Xt


@pytest.mark.performance
class TestNeighborhoodPerformance:
    """Test k-d tree query latency."""

    def test_query_latency(self, herbie_10k):
        from ligp.local_design import NeighborIndex

        X, Y, Xt = herbie_10k
        index = NeighborIndex(X, Y)
        metrics = PerformanceMetrics()

        for x_star in np.tile(Xt, (5, 1)):
            start = time.perf_counter()
            index.query(x_star, 50)
            metrics.record("query", (time.perf_counter() - start) * 1000)

        result = metrics.get_stats("query")
        print(
            f"\n📊 Neighborhood query: median {result['median']:.3f} ms, "
            f"P95 {result['p95']:.3f} ms"
        )
        assert result["median"] < PerformanceConstraints.NEIGHBOR_QUERY_BUDGET


@pytest.mark.performance
class TestDesignPerformance:
    """Compare per-site design cost of templates against bespoke wIMSE."""

    def _per_site_ms(self, results, phase):
        return [r.timings.get(phase, 0.0) * 1000 for r in results]

    def test_qnorm_site_budget(self, herbie_10k, performance_report):
        from ligp.predictor import PredictConfig, ligp_predict

        X, Y, Xt = herbie_10k
        results = ligp_predict(PredictConfig(m=10, n=50, workers=1), Xt, X, Y)
        for r in results:
            performance_report.record("ligp-qnorm site", r.elapsed * 1000)

        median = float(np.median([r.elapsed * 1000 for r in results]))
        print(f"\n📊 ligp-qnorm: median {median:.1f} ms per site")
        assert all(r.ok for r in results)
        assert median < PerformanceConstraints.QNORM_SITE_BUDGET

    def test_template_cheaper_than_bespoke(self, herbie_10k, performance_report):
        """Displacing a template costs less per site than a fresh greedy design."""
        from ligp.predictor import PredictConfig, ligp_predict
        from ligp.timing import PhaseTimer

        X, Y, Xt = herbie_10k
        sites = Xt[:6]
        batch = PhaseTimer()
        shared = dict(m=10, n=50, workers=1, n_starts=5)
        template = ligp_predict(
            PredictConfig(method="ligp-wimse-template", **shared), sites, X, Y, batch_timer=batch
        )
        bespoke = ligp_predict(PredictConfig(method="ligp-wimse-bespoke", **shared), sites, X, Y)

        template_design = float(np.median(self._per_site_ms(template, "design")))
        bespoke_design = float(np.median(self._per_site_ms(bespoke, "design")))
        for r in template:
            performance_report.record("ligp-wimse-template site", r.elapsed * 1000)
        for r in bespoke:
            performance_report.record("ligp-wimse-bespoke site", r.elapsed * 1000)

        print(
            f"\n📊 Design time per site: template {template_design:.2f} ms, "
            f"bespoke {bespoke_design:.1f} ms"
        )
        print(f"   Template build (once): {batch.as_dict().get('template', 0.0) * 1000:.1f} ms")
        assert template_design < bespoke_design
        template_site = float(np.median([r.elapsed * 1000 for r in template]))
        assert template_site < PerformanceConstraints.TEMPLATE_SITE_BUDGET
