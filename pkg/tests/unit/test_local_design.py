"""Unit tests for neighborhoods, lengthscale heuristics, templates and greedy designs."""

import numpy as np
import pytest


class TestNeighborIndex:
    """Test exact nearest-neighbor queries."""

    def test_matches_brute_force(self, rng):
        """k-d tree neighborhood equals a full sort of the distances."""
        from ligp.local_design import NeighborIndex

        X = rng.random((2000, 5))
        x_star = rng.random(5)
        nbhd = NeighborIndex(X).query(x_star, 60)
        brute = np.argsort(np.sum((X - x_star) ** 2, axis=1), kind="stable")[:60]

        assert set(nbhd.indices.tolist()) == set(brute.tolist())
        assert nbhd.x_n.shape == (60, 5)
        assert nbhd.y_n is None
        print("✅ Neighborhood matches brute force")

    def test_ties_go_to_lowest_index(self):
        """Equidistant points at the boundary are taken in row order."""
        from ligp.local_design import nearest_neighbors

        X = np.array([[2.0], [1.0], [-1.0], [1.0], [0.5]])
        Y = np.arange(5.0)
        nbhd = nearest_neighbors(X, [0.0], 3, Y_N=Y)

        assert nbhd.indices.tolist() == [4, 1, 2]
        assert nbhd.y_n.tolist() == [4.0, 1.0, 2.0]

    def test_invalid_sizes(self, rng):
        from ligp.local_design import NeighborIndex

        index = NeighborIndex(rng.random((10, 2)))
        with pytest.raises(ValueError):
            index.query([0.5, 0.5], 11)
        with pytest.raises(ValueError):
            index.query([0.5, 0.5, 0.5], 3)


class TestLengthscaleHeuristics:
    """Test the starting lengthscale heuristics."""

    def test_quantile_on_unit_grid(self):
        """Matches the 10% quantile of squared pairwise distances."""
        from ligp.local_design import theta0_quantile

        x = np.arange(10.0)[:, None]
        d2 = [(i - j) ** 2 for i in range(10) for j in range(i + 1, 10)]
        assert theta0_quantile(x) == pytest.approx(float(np.quantile(d2, 0.1)))

    def test_quantile_degenerate(self):
        from ligp.local_design import DegenerateGeometryError, theta0_quantile

        with pytest.raises(DegenerateGeometryError):
            theta0_quantile(np.ones((5, 2)))

    def test_gauss(self):
        """((1/3) max coordinate deviation)^2."""
        from ligp.local_design import theta0_gauss

        x = np.array([[0.0, 0.0], [3.0, -1.0], [1.0, 2.0]])
        assert theta0_gauss(x, [0.0, 0.0]) == pytest.approx(1.0)
        assert theta0_gauss(np.zeros((3, 2)), [0.0, 0.0]) == 0.0


class TestLatinHypercube:
    """Test the Latin hypercube sampler."""

    def test_one_point_per_stratum(self):
        from ligp.local_design import lhs

        sample = lhs(25, 3, seed=1)
        assert sample.shape == (25, 3)
        assert np.all((sample >= 0.0) & (sample < 1.0))
        for column in sample.T:
            assert sorted(np.floor(column * 25).astype(int).tolist()) == list(range(25))

    def test_seeded(self):
        from ligp.local_design import lhs

        np.testing.assert_array_equal(lhs(8, 2, seed=3), lhs(8, 2, seed=3))
        with pytest.raises(ValueError):
            lhs(0, 2)


class TestTemplates:
    """Test the space-filling and wIMSE templates."""

    def test_chr_inside_bounding_box(self, rng):
        """cHR points lie in the neighborhood box with x_star first."""
        from ligp.local_design import chr_template, fraction_inside

        X = rng.random((300, 2))
        x_star = np.array([0.4, 0.6])
        inducing, nbhd = chr_template(8, 40, x_star, X, None, seed=5)

        assert inducing.shape == (8, 2)
        np.testing.assert_array_equal(inducing[0], x_star)
        assert fraction_inside(inducing[1:], nbhd) == 1.0

    def test_qnorm_centered_on_site(self, rng):
        """qNorm points spread around x_star with scale sqrt(theta0_gauss)."""
        from ligp.local_design import qnorm_template, theta0_gauss

        X = rng.random((300, 2))
        x_star = np.array([0.5, 0.5])
        inducing, nbhd = qnorm_template(30, 60, x_star, X, None, seed=2)
        sigma = np.sqrt(theta0_gauss(nbhd.x_n, x_star))

        assert inducing.shape == (30, 2)
        np.testing.assert_array_equal(inducing[0], x_star)
        assert np.all(np.abs(inducing - x_star) < 7.0 * sigma)
        print(f"✅ qNorm sigma={sigma:.4f}")

    def test_qnorm_degenerate_neighborhood(self):
        """No spread around x_star is a geometry error."""
        from ligp.local_design import DegenerateGeometryError, Neighborhood, qnorm_template

        x_star = np.array([0.3, 0.3])
        nbhd = Neighborhood(
            indices=np.arange(4), x_n=np.tile(x_star, (4, 1)), y_n=np.ones(4), center=x_star
        )
        with pytest.raises(DegenerateGeometryError):
            qnorm_template(3, 4, x_star, None, None, neighborhood=nbhd)

    def test_template_validation(self):
        from ligp.local_design import Template

        with pytest.raises(ValueError, match="zero vector"):
            Template(offsets=np.ones((2, 2)), theta0=0.1, build_center=np.zeros(2))
        with pytest.raises(ValueError):
            Template(offsets=np.zeros((1, 2)), theta0=0.1, build_center=np.zeros(2), kind="grid")

    def test_save_and_load(self, tmp_path, rng):
        """A saved template reloads with identical offsets."""
        from ligp.local_design import Template, load_template, save_template

        offsets = np.vstack([np.zeros(3), rng.standard_normal((4, 3))])
        template = Template(
            offsets=offsets, theta0=0.0123, build_center=rng.random(3), kind="qnorm"
        )
        path = save_template(template, tmp_path / "t.txt")
        loaded = load_template(path)

        np.testing.assert_array_equal(loaded.offsets, template.offsets)
        np.testing.assert_array_equal(loaded.build_center, template.build_center)
        assert loaded.theta0 == template.theta0
        assert loaded.kind == "qnorm"

    def test_scale_lengths_round_trip(self, tmp_path, rng):
        """Scale lengths are saved with the template and validated on load."""
        from ligp.local_design import Template, load_template, save_template

        offsets = np.vstack([np.zeros(2), rng.standard_normal((3, 2))])
        template = Template(
            offsets=offsets, theta0=0.05, build_center=np.zeros(2), scale_lengths=[0.5, 2.0]
        )
        loaded = load_template(save_template(template, tmp_path / "scaled.txt"))

        np.testing.assert_array_equal(loaded.scale_lengths, [0.5, 2.0])
        raw = save_template(Template(offsets, 0.05, np.zeros(2)), tmp_path / "raw.txt")
        assert load_template(raw).scale_lengths is None
        with pytest.raises(ValueError, match="scale_lengths"):
            Template(
                offsets=offsets, theta0=0.05, build_center=np.zeros(2), scale_lengths=[1.0, 0.0]
            )

    def test_sfd_template_theta0_matches_predictor_start(self, rng):
        """qnorm templates record theta0_gauss, chr templates theta0_quantile."""
        from ligp.local_design import (
            build_sfd_template,
            nearest_neighbors,
            theta0_gauss,
            theta0_quantile,
        )

        X = rng.random((300, 2))
        center = np.median(X, axis=0)
        nbhd = nearest_neighbors(X, center, 30)

        qnorm = build_sfd_template("qnorm", 5, 30, X, None, seed=2)
        chr_ = build_sfd_template("chr", 5, 30, X, None, seed=2)
        assert qnorm.theta0 == pytest.approx(theta0_gauss(nbhd.x_n, center))
        assert chr_.theta0 == pytest.approx(theta0_quantile(nbhd.x_n))

    def test_load_rejects_bad_rows(self, tmp_path):
        from ligp.local_design import load_template

        path = tmp_path / "bad.txt"
        path.write_text("2 2 0.1 wimse\n0 0\n1.0\n")
        with pytest.raises(ValueError, match=":3:"):
            load_template(path)

    def test_displace(self, rng):
        from ligp.local_design import Template, displace_template

        X = rng.random((100, 2))
        offsets = np.array([[0.0, 0.0], [0.1, -0.1]])
        template = Template(offsets=offsets, theta0=0.01, build_center=np.zeros(2))
        inducing, nbhd = displace_template(template, [0.5, 0.5], X, None, 20)
        np.testing.assert_allclose(inducing, [[0.5, 0.5], [0.6, 0.4]])
        assert nbhd.n == 20


class TestGreedyDesigns:
    """Test the greedy wIMSE and global designs."""

    def test_wimse_design(self, rng):
        """Greedy design starts at x_star, reaches m points and never raises the achieved wIMSE."""
        from ligp.gp_core import Domain
        from ligp.local_design import greedy_wimse_design

        X = rng.random((400, 2))
        Y = np.sin(5.0 * X[:, 0]) + X[:, 1]
        x_star = np.array([0.45, 0.55])
        history = []
        inducing, nbhd = greedy_wimse_design(
            5, 40, x_star, X, Y, Domain.cube(2), seed=11, n_starts=5, history=history
        )

        assert inducing.shape == (5, 2)
        np.testing.assert_array_equal(inducing[0], x_star)
        assert len(history) == 4
        assert all(h > 0 for h in history)
        assert all(b <= a * (1 + 1e-9) for a, b in zip(history, history[1:]))
        lo, hi = nbhd.bounding_box()
        assert np.all((inducing[1:] >= lo - 1e-12) & (inducing[1:] <= hi + 1e-12))
        print(f"✅ wIMSE path: {np.round(history, 6)}")

    def test_wimse_design_needs_n_at_least_m(self, rng):
        from ligp.gp_core import Domain
        from ligp.local_design import greedy_wimse_design

        with pytest.raises(ValueError):
            greedy_wimse_design(10, 5, [0.5, 0.5], rng.random((50, 2)), None, Domain.cube(2))

    def test_template_from_median(self, rng):
        """wIMSE template offsets are relative to the design median."""
        from ligp.gp_core import Domain
        from ligp.local_design import build_wimse_template

        X = rng.random((300, 2))
        template = build_wimse_template(4, 30, X, None, Domain.cube(2), seed=1, n_starts=3)

        np.testing.assert_allclose(template.build_center, np.median(X, axis=0))
        assert np.all(template.offsets[0] == 0.0)
        assert template.kind == "wimse"
        assert template.theta0 > 0

    def test_global_alc_path(self, rng):
        """Each greedy step adds exactly one inducing point."""
        from ligp.gp_core import Domain
        from ligp.local_design import greedy_global_design

        X = rng.random((60, 2))
        Y = np.cos(3.0 * X).sum(axis=1)
        axis = np.linspace(0.0, 1.0, 6)
        cands = np.array(np.meshgrid(axis, axis)).reshape(2, -1).T
        path = greedy_global_design(
            "alc", 9, X, Y, Domain.cube(2), 0.05, 1e-6, cands, ref_set=X[:20], M0=4, seed=3
        )

        assert path.sizes == list(range(4, 4 + len(path.sizes)))
        assert path.sizes[-1] <= 9
        for size, design in path:
            assert design.shape == (size, 2)

    def test_global_criterion_name(self, rng):
        from ligp.gp_core import Domain
        from ligp.local_design import greedy_global_design

        with pytest.raises(ValueError):
            greedy_global_design(
                "mse", 5, rng.random((10, 1)), np.ones(10), Domain.cube(1), 0.1, 1e-6, [[0.5]]
            )
