from typing import Any

import numpy as np
import pytest

from nullgeo.energy import (
    NullVector,
    WeylField,
    bel_robinson_contract,
    bel_robinson_divergence,
    bel_robinson_tensor,
    multiplier,
    weyl_field,
)
from nullgeo.errors import ConfigurationError
from nullgeo.spacetime import FrameCalculus, NullPair, Schwarzschild


@pytest.fixture
def random_weyl(
    schwarzschild_pair: NullPair, random_components: dict[str, np.ndarray]
) -> WeylField:
    """Return a Weyl field with random null components."""
    return WeylField(schwarzschild_pair, random_components)


class TestMultipliers:
    """Test the named multipliers."""

    def test_morawetz_weights(self) -> None:
        """Test K = 1/2 (ubar^2 l + u^2 lbar)."""
        vector = multiplier("K", -1.0, 3.0)
        assert vector.outgoing == pytest.approx(4.5)
        assert vector.incoming == pytest.approx(0.5)
        assert vector.is_future_causal

    def test_past_directed(self) -> None:
        """Test a negative coefficient is not future causal."""
        assert not NullVector(-1.0, 1.0).is_future_causal

    def test_unknown_multiplier(self) -> None:
        """Test an unknown multiplier name raises."""
        with pytest.raises(ConfigurationError, match="unknown multiplier"):
            multiplier("Z", 0.0, 1.0)


class TestBelRobinson:
    """Test the Bel-Robinson tensor and its contractions."""

    def test_zero_field(self, schwarzschild_pair: NullPair) -> None:
        """Test Q of the zero Weyl field vanishes."""
        vectors = [multiplier("T", 0.0, 1.0)] * 4
        values = bel_robinson_contract(WeylField.zero(schwarzschild_pair), vectors)
        assert np.all(values == 0.0)

    def test_schwarzschild_coulomb_energy(
        self, schwarzschild_points: np.ndarray
    ) -> None:
        """Test Q(lbar, l, lbar, l) = 4 rho^2 = 16 M^2 / r^6."""
        weyl = weyl_field(FrameCalculus(Schwarzschild(mass=1.0)), schwarzschild_points)
        radius = np.linalg.norm(schwarzschild_points[:, 1:], axis=-1)
        vectors = [multiplier(name, 0.0, 1.0) for name in ("lb", "l", "lb", "l")]
        null = bel_robinson_contract(weyl, vectors)
        index = bel_robinson_contract(weyl, vectors, method="index")
        assert np.allclose(null, 16.0 / radius**6, rtol=1e-6)
        assert np.allclose(index, null, rtol=1e-6)

    @pytest.mark.parametrize(
        "names",
        [
            ("T", "T", "T", "T"),
            ("K", "K", "T", "lb"),
            ("S", "l", "K", "T"),
            ("l", "l", "l", "l"),
        ],
    )
    def test_null_expansion_matches_index_sum(
        self, random_weyl: WeylField, names: tuple[str, ...]
    ) -> None:
        """Test the null expansion equals the full index contraction."""
        vectors = [multiplier(name, -1.0, 3.0) for name in names]
        null = bel_robinson_contract(random_weyl, vectors)
        index = bel_robinson_contract(random_weyl, vectors, method="index")
        assert np.allclose(null, index, rtol=1e-9, atol=1e-9)

    def test_dominant_energy(self, random_weyl: WeylField) -> None:
        """Test Q is non-negative on future causal multipliers."""
        vectors = [multiplier(name, 0.5, 2.0) for name in ("K", "S", "T", "lb")]
        assert np.all(bel_robinson_contract(random_weyl, vectors) >= 0.0)

    def test_symmetric_and_trace_free(self, random_weyl: WeylField) -> None:
        """Test Q is fully symmetric and trace-free."""
        tensor = bel_robinson_tensor(random_weyl)
        scale = float(np.max(np.abs(tensor)))
        for pattern in ("...abcd->...bacd", "...abcd->...cbad", "...abcd->...dbca"):
            swapped = np.einsum(pattern, tensor)
            assert np.max(np.abs(tensor - swapped)) < 1e-10 * scale
        trace = np.einsum("...ab,...abcd->...cd", random_weyl.pair.inverse, tensor)
        assert np.max(np.abs(trace)) < 1e-10 * scale

    def test_divergence_free_in_vacuum(self, schwarzschild_points: np.ndarray) -> None:
        """Test DIV Q vanishes up to differencing error in Schwarzschild."""
        points = schwarzschild_points[:1]
        divergence, values = bel_robinson_divergence(
            FrameCalculus(Schwarzschild(mass=1.0)), points
        )
        radius = float(np.linalg.norm(points[0, 1:]))
        assert np.max(np.abs(divergence)) < 1e-3 * np.max(np.abs(values)) / radius

    def test_wrong_number_of_vectors(self, random_weyl: WeylField) -> None:
        """Test a contraction needs four vectors."""
        with pytest.raises(ConfigurationError, match="four vectors"):
            bel_robinson_contract(random_weyl, [multiplier("T", 0.0, 1.0)] * 3)

    def test_unknown_method(self, random_weyl: WeylField) -> None:
        """Test an unknown contraction method raises."""
        vectors = [multiplier("T", 0.0, 1.0)] * 4
        method: Any = "spinor"
        with pytest.raises(ConfigurationError, match="method"):
            bel_robinson_contract(random_weyl, vectors, method=method)
