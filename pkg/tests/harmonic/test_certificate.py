import numpy as np
import pytest

from nullgeo.harmonic import (
    ConformalBump,
    DiskMesh,
    HarmonicSolution,
    IdentityBalance,
    bochner_certificate,
    diffeomorphism_check,
    solve_dirichlet,
)
from nullgeo.spacetime.differences import fit_slope

EPSILON = 1e-2
REFINED_TERMS = {
    "hessian",
    "neumann",
    "traceless_ricci",
    "shape",
    "neumann_coupling",
    "mean_curvature_linear",
    "mean_curvature",
    "shear",
    "einstein_boundary",
    "einstein_volume",
}


class TestIdentityBalance:
    """Test the two-sided identity record."""

    def test_relative(self) -> None:
        """Test the relative mismatch and its floor."""
        balance = IdentityBalance("energy", 2.0, 2.5)
        assert balance.mismatch == pytest.approx(0.5)
        assert balance.relative() == pytest.approx(0.25)
        assert balance.relative(floor=5.0) == pytest.approx(0.1)
        assert IdentityBalance("energy", 0.0, 1e-3).relative() == pytest.approx(1e-3)

    def test_to_dict(self) -> None:
        """Test the summary carries both sides and the terms."""
        summary = IdentityBalance("bochner", 1.0, 1.0, {"flux": 1.0}).to_dict()
        assert summary == {
            "lhs": 1.0,
            "rhs": 1.0,
            "mismatch": 0.0,
            "terms": {"flux": 1.0},
        }


class TestBochnerCertificate:
    """Test the integral identities of harmonic coordinates."""

    def test_flat(self, flat_solution: HarmonicSolution) -> None:
        """Test every term vanishes on the Euclidean ball."""
        certificate = bochner_certificate(flat_solution)
        assert certificate.energy.lhs == pytest.approx(4.0 * np.pi, rel=1e-10)
        assert certificate.energy.rhs == pytest.approx(4.0 * np.pi, rel=1e-10)
        for value in certificate.refined.terms.values():
            assert value == pytest.approx(0.0, abs=1e-8)
        assert certificate.bochner.mismatch < 1e-8
        assert certificate.refined.mismatch < 1e-8
        assert certificate.estimates["gram_ratio"] is None
        assert certificate.estimates["gram_max_dev"] < 1e-8

    def test_bump(self, bump_solution: HarmonicSolution) -> None:
        """Test the energy and Bochner identities on a curved ball."""
        certificate = bochner_certificate(bump_solution)
        assert certificate.energy.relative() < 1e-6
        assert certificate.bochner.lhs > 0.0
        assert certificate.bochner.relative() < 1e-4
        assert set(certificate.refined.terms) == REFINED_TERMS
        terms = certificate.refined.terms
        assert certificate.refined.lhs == pytest.approx(
            terms["hessian"] + 2.0 * terms["neumann"]
        )
        assert certificate.estimates["gram_ratio"] <= 10.0
        assert certificate.estimates["ricci_l2"] > 0.0

    def test_summary(self, bump_solution: HarmonicSolution) -> None:
        """Test the JSON summary lists the three identities and the estimates."""
        summary = bochner_certificate(bump_solution).to_dict()
        assert set(summary) == {"energy", "bochner", "refined", "estimates"}
        assert "regularity_ratio" in summary["estimates"]

    def test_quadratic_hessian(self) -> None:
        """Test ||D^2 x||^2 grows like epsilon^2."""
        sizes = [2.5e-3, 5e-3, 1e-2]
        hessians = []
        for epsilon in sizes:
            mesh = DiskMesh(ConformalBump(epsilon=epsilon), radial=12, band_limit=4)
            certificate = bochner_certificate(solve_dirichlet(mesh))
            hessians.append(certificate.estimates["hessian_l2_squared"])
        assert fit_slope(sizes, hessians) == pytest.approx(2.0, abs=0.1)


class TestDiffeomorphismCheck:
    """Test the global scan of the harmonic map."""

    def test_flat(self, flat_solution: HarmonicSolution) -> None:
        """Test the identity map of the Euclidean ball."""
        report = diffeomorphism_check(flat_solution)
        assert report.det_min == pytest.approx(1.0, abs=1e-8)
        assert report.det_max == pytest.approx(1.0, abs=1e-8)
        assert report.separation == pytest.approx(1.0, abs=1e-8)
        assert report.contained
        assert report.guaranteed
        assert not report.flagged

    def test_bump(self, bump_solution: HarmonicSolution) -> None:
        """Test a small bump keeps the map a diffeomorphism."""
        report = diffeomorphism_check(bump_solution)
        assert report.det_min > 0.8
        assert report.separation > 0.0
        assert not report.flagged
        assert report.to_dict()["flagged"] is False
