import pytest

from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import ConeState
from nullgeo.structure import eval_commutation
from nullgeo.structure.commutation import Commutator


class TestCommutation:
    """Test the commutators of projected derivatives on sample fields."""

    @pytest.mark.parametrize("sample", ["scalar", "one_form", "symmetric"])
    @pytest.mark.parametrize("which", ["4", "3", "34"])
    def test_flat(
        self, flat_cone: ConeState, sample: str, which: Commutator
    ) -> None:
        """Test every commutator identity on a flat sphere."""
        report = eval_commutation(flat_cone, sample, which)
        assert report.norms["Linf"] < 1e-6

    @pytest.mark.parametrize("sample", ["scalar", "one_form"])
    @pytest.mark.parametrize("which", ["4", "3", "34"])
    def test_schwarzschild(
        self, schwarzschild_cone: ConeState, sample: str, which: Commutator
    ) -> None:
        """Test the identities with the expansions and omegab of Schwarzschild."""
        report = eval_commutation(schwarzschild_cone, sample, which)
        assert report.norms["Linf"] < 1e-6

    def test_zeroth_order_terms_vanish(self, schwarzschild_cone: ConeState) -> None:
        """Test the zeroth-order terms vanish when xi, etab and beta do."""
        full = eval_commutation(schwarzschild_cone, "symmetric", "4")
        bare = eval_commutation(
            schwarzschild_cone, "symmetric", "4", error_terms=False
        )
        assert full.norms["Linf"] < 1e-6
        assert bare.norms["Linf"] == pytest.approx(full.norms["Linf"], abs=1e-8)
        assert bare.parameters["error_terms"] is False

    def test_report_id(self, flat_cone: ConeState) -> None:
        """Test the report names the commutator and sample."""
        report = eval_commutation(flat_cone, "scalar", "34")
        assert report.id == "commute_nabla3_nabla4"
        assert report.parameters["sample"] == "scalar"
        assert report.residual.rank == 0

    def test_unknown_sample(self, flat_cone: ConeState) -> None:
        """Test unknown samples are configuration errors."""
        with pytest.raises(ConfigurationError):
            eval_commutation(flat_cone, "vector")

    def test_unknown_commutator(self, flat_cone: ConeState) -> None:
        """Test unknown commutators are configuration errors."""
        with pytest.raises(ConfigurationError):
            eval_commutation(
                flat_cone, "scalar", "12"  # pyright: ignore[reportArgumentType]
            )
