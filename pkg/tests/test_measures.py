"""Unit tests for ifslab.measures."""

import numpy as np
import pytest
from scipy.optimize import linprog

from ifslab.engine import IFS, EmpiricalMeasure, inverse_system, stationary_sample
from ifslab.geometry import Arnold, Rotation
from ifslab.measures import (
    ChiMetric,
    atom_scan,
    chi_eval,
    chi_lipschitz_probe,
    chi_nonexpansiveness,
    chi_table,
    invariance_residual,
    max_gap,
    max_gap_points,
    nonexpansiveness_probe,
    w1_circle,
)


class TestWasserstein:
    """Tests for circular W1."""

    def test_diracs(self):
        """Test that W1 of point masses is the circle distance."""
        assert w1_circle(EmpiricalMeasure.dirac(0.1), EmpiricalMeasure.dirac(0.9)) == pytest.approx(0.2)
        assert w1_circle(EmpiricalMeasure.dirac(0.0), EmpiricalMeasure.dirac(0.5)) == pytest.approx(0.5)

    def test_identical_measures(self):
        """Test W1(mu, mu) = 0."""
        mu = EmpiricalMeasure.from_samples([0.1, 0.4, 0.8])
        assert w1_circle(mu, mu) == pytest.approx(0.0, abs=1e-15)

    def test_symmetric(self):
        """Test symmetry."""
        mu = EmpiricalMeasure.from_samples([0.1, 0.2, 0.25])
        nu = EmpiricalMeasure.from_samples([0.6, 0.95])
        assert w1_circle(mu, nu) == pytest.approx(w1_circle(nu, mu))

    def test_rotation_invariance(self):
        """Test that rotating both measures keeps the distance."""
        mu = EmpiricalMeasure.from_samples([0.1, 0.2, 0.7])
        nu = EmpiricalMeasure.from_samples([0.3, 0.5])
        shifted = w1_circle(
            EmpiricalMeasure.from_samples(mu.positions + 0.37),
            EmpiricalMeasure.from_samples(nu.positions + 0.37),
        )
        assert shifted == pytest.approx(w1_circle(mu, nu))

    def test_half_split(self):
        """Test the mass split across the antipode."""
        mu = EmpiricalMeasure.from_atoms([(0.0, 0.5), (0.5, 0.5)])
        nu = EmpiricalMeasure.from_atoms([(0.25, 0.5), (0.75, 0.5)])
        assert w1_circle(mu, nu) == pytest.approx(0.25)

    def test_matches_transport_program(self):
        """Test against the transport linear program with circle costs."""
        mu = EmpiricalMeasure.from_atoms([(0.05, 0.3), (0.4, 0.5), (0.9, 0.2)])
        nu = EmpiricalMeasure.from_atoms([(0.2, 0.6), (0.7, 0.4)])
        a, b = mu.weights, nu.weights
        diff = np.abs(mu.positions[:, None] - nu.positions[None, :])
        cost = np.minimum(diff, 1.0 - diff)
        n, m = cost.shape
        rows = np.kron(np.eye(n), np.ones(m))
        cols = np.kron(np.ones(n), np.eye(m))
        result = linprog(cost.ravel(), A_eq=np.vstack([rows, cols]), b_eq=np.concatenate([a, b]),
                         bounds=(0, None), method="highs")
        assert result.success
        assert w1_circle(mu, nu) == pytest.approx(result.fun, abs=1e-9)

    def test_uniform_grid_is_rotation_invariant(self):
        """Test that a rotation by 1/n fixes the uniform n-grid."""
        ifs = IFS((Rotation(0.1),), (1.0,))
        assert invariance_residual(ifs, EmpiricalMeasure.uniform_grid(10)) == pytest.approx(0.0, abs=1e-12)

    def test_rotations_do_not_expand(self, rotation_ifs):
        """Test the probe on an isometric system."""
        before, after = nonexpansiveness_probe(
            rotation_ifs, EmpiricalMeasure.dirac(0.0), EmpiricalMeasure.dirac(0.3)
        )
        assert after <= before + 1e-12

    def test_balanced_arnold_pair_does_not_expand(self):
        """Test W1 on two Arnold maps whose p-weighted derivatives average to 1."""
        ifs = IFS((Arnold(0.4142135623730951, 0.5), Arnold(0.3, -0.5)), (0.5, 0.5))
        assert float(ifs.maps[0].derivative(0.0)) == pytest.approx(1.5)
        rng = np.random.default_rng(3)
        for _ in range(20):
            mu = EmpiricalMeasure.from_atoms(zip(rng.random(4), rng.dirichlet(np.ones(4))))
            nu = EmpiricalMeasure.from_atoms(zip(rng.random(3), rng.dirichlet(np.ones(3))))
            before, after = nonexpansiveness_probe(ifs, mu, nu)
            assert after <= before + 1e-12

    def test_unbalanced_arnold_pair_can_expand(self, demo_ifs):
        """Test that nearby Diracs drift apart where both demo maps stretch."""
        before, after = nonexpansiveness_probe(demo_ifs, EmpiricalMeasure.dirac(0.0), EmpiricalMeasure.dirac(0.001))
        assert after > before


class TestSupport:
    """Tests for gaps and atoms."""

    def test_max_gap(self):
        """Test the longest empty arc, across 0."""
        gap, arc = max_gap_points([0.1, 0.3, 0.8])
        assert gap == pytest.approx(0.5)
        assert arc.as_tuple() == pytest.approx((0.3, 0.8))
        gap, arc = max_gap_points([0.2, 0.5, 0.7])
        assert gap == pytest.approx(0.5)
        assert arc.as_tuple() == pytest.approx((0.7, 0.2))

    def test_single_point(self):
        """Test that one point leaves the whole circle."""
        gap, arc = max_gap(EmpiricalMeasure.dirac(0.4))
        assert gap == 1.0
        assert arc.full

    def test_empty_rejected(self):
        """Test that no points is an error."""
        with pytest.raises(ValueError):
            max_gap_points([])

    def test_atom_scan_finds_heavy_atom(self):
        """Test that a 30% atom among spread mass is reported once."""
        spread = np.arange(70) / 70 + 0.001
        atoms = [(p, 0.01) for p in spread] + [(0.5, 0.3)]
        mu = EmpiricalMeasure.from_atoms(atoms)
        found = atom_scan(mu, window=1e-4, threshold=1e-2 + 1e-9)
        assert len(found) == 1
        point, mass = found[0]
        assert point.value == pytest.approx(0.5)
        assert mass == pytest.approx(0.3)

    def test_atom_scan_on_spread_measure(self):
        """Test that an atomless-looking sample gives nothing."""
        mu = EmpiricalMeasure.uniform_grid(1000)
        assert atom_scan(mu, window=1e-4, threshold=1e-2) == []


class TestChi:
    """Tests for the chi metric."""

    @pytest.fixture
    def uniform_chi(self) -> ChiMetric:
        return ChiMetric(EmpiricalMeasure.uniform_grid(1000))

    def test_chi_on_uniform_reference(self, uniform_chi):
        """Test that chi is close to the circle distance for uniform m."""
        assert chi_eval(uniform_chi, 0.1, 0.3) == pytest.approx(0.2, abs=0.002)
        assert chi_eval(uniform_chi, 0.1, 0.9) == pytest.approx(0.2, abs=0.002)

    def test_chi_zero_on_diagonal(self, uniform_chi):
        """Test chi(x, x) = 0 even though [x, x] carries an atom."""
        assert chi_eval(uniform_chi, 0.0, 0.0) == 0.0
        assert uniform_chi.pairwise(np.array([0.5]), np.array([0.5]))[0] == 0.0

    def test_probe(self, uniform_chi):
        """Test the probe function z -> chi(z, z0)."""
        probe = chi_lipschitz_probe(uniform_chi, 0.25)
        assert probe(0.5) == pytest.approx(0.25, abs=0.002)
        assert probe(np.array([0.25, 0.75])).shape == (2,)

    def test_table(self, uniform_chi):
        """Test the side-by-side table."""
        rows = chi_table(uniform_chi, [(0.1, 0.3)])
        assert set(rows[0]) == {"x", "y", "circ_dist", "chi"}
        assert rows[0]["circ_dist"] == pytest.approx(0.2)

    def test_rotations_are_nonexpansive(self, rotation_ifs):
        """Test the check on rotations, whose inverse system keeps Lebesgue measure."""
        base = stationary_sample(inverse_system(rotation_ifs), 1000, 20000, 1, seed=4)
        chi = ChiMetric(base)
        rng = np.random.default_rng(0)
        pairs = [tuple(p) for p in rng.random((20, 2))]
        ok, worst = chi_nonexpansiveness(rotation_ifs, chi, [0.0, 0.3], pairs, slack=0.05)
        assert ok

    @pytest.mark.slow
    def test_demo_is_nonexpansive(self, demo_ifs):
        """Test |Uf(x) - Uf(y)| <= chi(x, y) + 3e-3 on the demo Arnold system."""
        base = stationary_sample(inverse_system(demo_ifs), 1000, 300000, 1, seed=12)
        chi = ChiMetric(base)
        rng = np.random.default_rng(5)
        pairs = [tuple(p) for p in rng.random((100, 2))]
        probes = rng.random(10).tolist()
        ok, worst = chi_nonexpansiveness(demo_ifs, chi, probes, pairs, slack=3e-3)
        assert ok, worst
