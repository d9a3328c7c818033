"""Two-level annealing caricature: exact gaps and time estimates."""

import math

import numpy as np
import pytest

from qubolattice.cartoon import (
    CartoonError,
    CartoonModel,
    lz_time,
    min_gap,
    report_rows,
    spectral_gap,
    two_level_hamiltonian,
)


class TestHamiltonian:
    def test_schedule_start_spectrum(self):
        h = two_level_hamiltonian(CartoonModel(4, 0.0))
        evals = np.linalg.eigvalsh(h)
        assert evals[0] == pytest.approx(-1.0, abs=1e-12)
        assert evals[1] == pytest.approx(0.0, abs=1e-12)

    def test_schedule_end_is_diagonal(self):
        h = two_level_hamiltonian(CartoonModel(4, 1.0))
        assert h[0, 1] == 0.0
        assert h[0, 0] == 0.0 and h[1, 1] == 1.0

    def test_midpoint_gap_quarter(self):
        assert spectral_gap(4, 0.5) == pytest.approx(0.25, abs=1e-12)

    def test_invalid_parameters(self):
        with pytest.raises(CartoonError):
            CartoonModel(0)
        with pytest.raises(CartoonError):
            CartoonModel(3, 1.5)


class TestMinGap:
    @pytest.mark.parametrize("n,expected", [(2, 0.5), (10, 2.0**-5), (1, math.sqrt(0.5))])
    def test_closed_form(self, n, expected):
        gap, s_star = min_gap(n)
        assert gap == pytest.approx(expected, abs=1e-9)
        assert s_star == pytest.approx(0.5, abs=1e-6)

    def test_exact_identity_across_sizes(self):
        for n in range(1, 21):
            gap, _ = min_gap(n)
            assert gap * gap * 2**n == pytest.approx(1.0, abs=1e-9)

    def test_no_crossing_on_grid(self):
        svals = np.linspace(0.0, 1.0, 10_001)
        gaps = [spectral_gap(6, s) for s in svals]
        assert min(gaps) > 0.0


class TestLzTime:
    def test_linear_and_optimal(self):
        assert lz_time(4, "linear") == 16.0
        assert lz_time(4, "optimal") == 4.0

    def test_trivial_size(self):
        assert lz_time(0, "linear") == 1.0
        assert lz_time(0, "optimal") == 1.0

    def test_unknown_schedule(self):
        with pytest.raises(CartoonError):
            lz_time(4, "adiabatic")

    def test_report_rows(self):
        rows = report_rows([1, 2])
        assert rows[0]["tau_linear"] == 2.0
        assert rows[1]["gap"] == pytest.approx(0.5, abs=1e-9)
