"""Tests for permittivity models and medium diagnostics."""

import numpy as np
import pandas as pd
import pytest

from cavity_decay.dielectric import (
    ComplexPermittivity,
    DielectricModel,
    LorentzParameters,
    eval_permittivity,
    kramers_kronig_residual,
    longitudinal_frequency,
    permittivity_values,
    refractive_index,
    resolve_variant,
    static_permittivity_check,
)


def _table(omega, eps_re, eps_im) -> pd.DataFrame:
    return pd.DataFrame({"omega": omega, "eps_re": eps_re, "eps_im": eps_im})


class TestLorentzModels:
    """Test the two Lorentz variants."""

    def test_resonance_value(self, fixed_damping_model):
        """Test eps(omega_T) = 1 + i omega_P^2 / (gamma omega_T)."""
        eps = eval_permittivity(fixed_damping_model, 1.0)
        assert eps.eps_re == pytest.approx(1.0)
        assert eps.eps_im == pytest.approx(4.232)

    def test_static_value(self, fixed_damping_model):
        """Test the frequency-independent damping leaves eps_im finite at omega -> 0."""
        eps = eval_permittivity(fixed_damping_model, 1e-9)
        assert eps.eps_re == pytest.approx(1.2110723192, rel=1e-10)
        assert eps.eps_im == pytest.approx(0.0105536159601, rel=1e-10)

    def test_standard_damping_vanishes_at_zero(self):
        """Test that the causal variant has eps_im -> 0 as omega -> 0."""
        model = DielectricModel.standard_lorentz(1.0, 0.46, 0.05)
        assert eval_permittivity(model, 1e-9).eps_im == pytest.approx(0.0, abs=1e-10)
        assert eval_permittivity(model, 1.0).eps_im == pytest.approx(4.232)

    def test_variants_differ_off_resonance(self, fixed_damping_model):
        """Test that the damping terms only agree at omega_T."""
        standard = DielectricModel.standard_lorentz(1.0, 0.46, 0.05)
        omega = np.array([0.5, 1.0, 1.5])
        fixed = permittivity_values(fixed_damping_model, omega)
        causal = permittivity_values(standard, omega)
        assert fixed[1] == pytest.approx(causal[1])
        assert fixed[0].imag > causal[0].imag
        assert fixed[2].imag < causal[2].imag

    def test_variants_agree_to_first_order_in_damping(self, rng):
        """Test that the variants differ by O(gamma) away from the absorption band."""
        below = rng.uniform(0.3, 0.85, size=10)
        above = rng.uniform(1.2, 2.0, size=10)
        for omega in np.concatenate([below, above]):
            differences = []
            for gamma in (0.02, 0.01):
                fixed = DielectricModel.fixed_damping_lorentz(1.0, 0.46, gamma)
                standard = DielectricModel.standard_lorentz(1.0, 0.46, gamma)
                difference = permittivity_values(fixed, omega) - permittivity_values(
                    standard, omega
                )
                differences.append(abs(complex(difference)))
            assert differences[0] < 10 * 0.02
            assert differences[0] / differences[1] == pytest.approx(2.0, abs=0.2)

    def test_vectorized_matches_scalar(self, fixed_damping_model):
        """Test that the array and scalar evaluations agree."""
        omega = np.linspace(0.2, 1.5, 7)
        values = permittivity_values(fixed_damping_model, omega)
        for w, value in zip(omega, values, strict=True):
            assert eval_permittivity(fixed_damping_model, float(w)).value == pytest.approx(value)

    def test_passive(self, fixed_damping_model):
        """Test eps_im > 0 on a wide grid."""
        values = permittivity_values(fixed_damping_model, np.linspace(1e-3, 20, 500))
        assert np.all(values.imag > 0)

    def test_longitudinal_frequency(self):
        """Test omega_L = sqrt(omega_T^2 + omega_P^2)."""
        assert longitudinal_frequency(LorentzParameters()) == pytest.approx(1.10072703247)

    @pytest.mark.parametrize(
        "kwargs",
        [{"omega_T": 0.0}, {"omega_P": -0.1}, {"gamma": 0.0}],
    )
    def test_invalid_parameters(self, kwargs):
        """Test parameter validation."""
        with pytest.raises(ValueError):
            LorentzParameters(**kwargs)

    @pytest.mark.parametrize("omega", [0.0, -1.0, float("inf")])
    def test_invalid_frequency(self, fixed_damping_model, omega):
        """Test that non-positive or infinite frequencies raise ValueError."""
        with pytest.raises(ValueError, match="positive and finite"):
            eval_permittivity(fixed_damping_model, omega)

    def test_unknown_variant(self):
        """Test that an unknown variant is rejected."""
        with pytest.raises(ValueError, match="Unsupported model variant"):
            DielectricModel("drude")

    def test_variant_names(self):
        """Test that paper-lorentz names the fixed-damping variant."""
        assert resolve_variant("paper-lorentz") == "fixed-damping-lorentz"
        assert resolve_variant("standard-lorentz") == "standard-lorentz"
        with pytest.raises(ValueError, match="paper-lorentz"):
            resolve_variant("drude")


class TestConstantModel:
    """Test the frequency-independent model."""

    def test_constant_value(self):
        """Test that the value is returned at every frequency."""
        model = DielectricModel.constant_permittivity(2 + 0.5j)
        assert eval_permittivity(model, 0.3).value == 2 + 0.5j
        assert eval_permittivity(model, 7.0).value == 2 + 0.5j

    def test_active_constant_rejected(self):
        """Test that eps_im < 0 is rejected."""
        with pytest.raises(ValueError, match="passive"):
            DielectricModel.constant_permittivity(2 - 0.1j)

    def test_non_finite_permittivity(self):
        """Test that nan permittivity values are rejected."""
        with pytest.raises(ValueError, match="finite"):
            ComplexPermittivity(float("nan"), 0.0)


class TestRefractiveIndex:
    """Test the branch of sqrt(eps)."""

    def test_resonance_index(self):
        """Test n at eps = 1 + 4.232i."""
        n = refractive_index(ComplexPermittivity(1.0, 4.232))
        assert n.eta == pytest.approx(1.63531996, rel=1e-8)
        assert n.kappa == pytest.approx(1.29393639, rel=1e-8)

    def test_squares_back(self, lossy_eps):
        """Test n^2 = eps."""
        assert refractive_index(lossy_eps).value ** 2 == pytest.approx(lossy_eps.value)

    def test_negative_real_permittivity(self):
        """Test that eps = -4 gives a purely imaginary index."""
        n = refractive_index(ComplexPermittivity(-4.0, 0.0))
        assert n.eta == pytest.approx(0.0)
        assert n.kappa == pytest.approx(2.0)

    def test_branch_has_non_negative_kappa(self):
        """Test that the root is flipped into the upper half-plane."""
        n = refractive_index(ComplexPermittivity(-3.0, -4.0))
        assert n.kappa == pytest.approx(2.0)
        assert n.eta == pytest.approx(-1.0)

    def test_zero_permittivity(self):
        """Test that eps = 0 raises ValueError."""
        with pytest.raises(ValueError, match="undefined"):
            refractive_index(ComplexPermittivity(0.0, 0.0))


class TestTabulatedModel:
    """Test tabulated permittivity ingestion and interpolation."""

    def test_nodes_are_reproduced(self):
        """Test that interpolation passes through the nodes."""
        model = DielectricModel.from_table(
            _table([0.5, 1.0, 1.5, 2.0], [2, 3, 2.5, 2], [0, 1, 0.2, 0])
        )
        assert eval_permittivity(model, 1.0).value == pytest.approx(3 + 1j)
        assert eval_permittivity(model, 1.5).value == pytest.approx(2.5 + 0.2j)

    def test_no_negative_overshoot(self):
        """Test that a sharp absorption peak never interpolates below zero."""
        model = DielectricModel.from_table(
            _table([0.5, 0.8, 1.0, 1.2, 1.5, 2.0], [2] * 6, [0, 0, 3.0, 0, 0, 0])
        )
        values = permittivity_values(model, np.linspace(0.5, 2.0, 301))
        assert np.all(values.imag >= 0)

    def test_out_of_range(self):
        """Test that extrapolation is refused."""
        model = DielectricModel.from_table(_table([0.5, 1.0], [2, 2], [0.1, 0.1]))
        with pytest.raises(ValueError, match="outside the table range"):
            eval_permittivity(model, 1.2)
        assert model.frequency_range == (0.5, 1.0)

    @pytest.mark.parametrize(
        ("omega", "eps_im", "message"),
        [
            ([1.0, 0.5], [0.1, 0.1], "strictly increasing"),
            ([0.5, 1.0], [0.1, -0.1], "passive"),
            ([0.0, 1.0], [0.1, 0.1], "positive"),
            ([0.5, 1.0], [0.1, np.nan], "NaN"),
        ],
    )
    def test_invalid_tables(self, omega, eps_im, message):
        """Test table validation."""
        with pytest.raises(ValueError, match=message):
            DielectricModel.from_table(_table(omega, [2.0, 2.0], eps_im))

    def test_from_csv_three_columns(self, tmp_path):
        """Test the single-file CSV format with comments."""
        path = tmp_path / "eps.csv"
        path.write_text("# measured\nomega,eps_re,eps_im\n0.5,2.0,0.1\n1.0,2.5,0.3\n1.5,2.2,0.1\n")
        model = DielectricModel.from_csv(path)
        assert model.variant == "tabulated"
        assert model.source == str(path)
        assert eval_permittivity(model, 1.0).value == pytest.approx(2.5 + 0.3j)

    def test_from_csv_two_files(self, tmp_path):
        """Test real and imaginary parts from separate files."""
        real = tmp_path / "re.csv"
        imag = tmp_path / "im.csv"
        real.write_text("omega,eps_re\n0.5,2.0\n1.0,2.5\n")
        imag.write_text("omega,eps_im\n0.5,0.1\n1.0,0.3\n")
        model = DielectricModel.from_csv(real, imag)
        assert eval_permittivity(model, 0.5).value == pytest.approx(2.0 + 0.1j)

    def test_from_csv_mismatched_grids(self, tmp_path):
        """Test that the two files must share a grid."""
        real = tmp_path / "re.csv"
        imag = tmp_path / "im.csv"
        real.write_text("omega,eps_re\n0.5,2.0\n1.0,2.5\n")
        imag.write_text("omega,eps_im\n0.5,0.1\n1.1,0.3\n")
        with pytest.raises(ValueError, match="do not match"):
            DielectricModel.from_csv(real, imag)

    def test_from_csv_missing_columns(self, tmp_path):
        """Test the header check."""
        path = tmp_path / "eps.csv"
        path.write_text("w,re,im\n0.5,2.0,0.1\n1.0,2.5,0.3\n")
        with pytest.raises(ValueError, match="lacks columns"):
            DielectricModel.from_csv(path)

    def test_from_csv_missing_file(self, tmp_path):
        """Test that I/O errors propagate."""
        with pytest.raises(OSError):
            DielectricModel.from_csv(tmp_path / "absent.csv")

    def test_empty_csv(self, tmp_path):
        """Test that an empty file is a malformed table."""
        path = tmp_path / "eps.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="Malformed"):
            DielectricModel.from_csv(path)


class TestKramersKronig:
    """Test the causality diagnostic."""

    def test_standard_lorentz_is_causal(self):
        """Test that the causal model has a small residual."""
        model = DielectricModel.standard_lorentz(1.0, 0.46, 0.05)
        assert kramers_kronig_residual(model, np.linspace(1e-3, 20, 4096)) < 0.02

    def test_fixed_damping_lorentz_is_less_causal(self, fixed_damping_model):
        """Test that constant damping scores clearly worse than the causal model."""
        grid = np.linspace(1e-3, 20, 4096)
        standard = DielectricModel.standard_lorentz(1.0, 0.46, 0.05)
        assert kramers_kronig_residual(fixed_damping_model, grid) > 2 * kramers_kronig_residual(
            standard, grid
        )

    def test_grid_too_coarse(self, fixed_damping_model):
        """Test the minimum node count."""
        with pytest.raises(ValueError, match="too coarse"):
            kramers_kronig_residual(fixed_damping_model, np.linspace(0.1, 5, 32))

    def test_grid_not_increasing(self, fixed_damping_model):
        """Test that a decreasing grid is rejected."""
        with pytest.raises(ValueError, match="strictly increasing"):
            kramers_kronig_residual(fixed_damping_model, np.linspace(5, 0.1, 200))

    def test_small_grid_still_evaluates(self, fixed_damping_model):
        """Test that a grid below the recommended size returns a finite residual."""
        residual = kramers_kronig_residual(fixed_damping_model, np.linspace(1e-3, 20, 200))
        assert np.isfinite(residual)


class TestStaticPermittivityCheck:
    """Test the |eps(0+)| < 10 condition."""

    def test_fixed_damping_model_ok(self, fixed_damping_model):
        """Test the figure medium passes."""
        check = static_permittivity_check(fixed_damping_model)
        assert check.ok
        assert check.magnitude == pytest.approx(1.2111183, rel=1e-7)

    def test_strong_oscillator_warns(self):
        """Test eps(0) = 1 + 3.1^2 > 10 is flagged."""
        check = static_permittivity_check(DielectricModel.fixed_damping_lorentz(1.0, 3.1, 0.05))
        assert check.status == "warn"
        assert not check.ok

    def test_tabulated_checks_first_node(self):
        """Test that a table is checked at its lowest frequency."""
        model = DielectricModel.from_table(_table([0.5, 1.0], [12.0, 2.0], [0.0, 0.0]))
        check = static_permittivity_check(model)
        assert check.magnitude == pytest.approx(12.0)
        assert check.status == "warn"
