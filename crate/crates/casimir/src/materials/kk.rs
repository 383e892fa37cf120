//! Kramers-Kronig transform of a tabulated absorption spectrum onto the
//! imaginary frequency axis:
//!
//! eps(i xi) = 1 + (2/pi) * integral_0^inf  w * eps''(w) / (w^2 + xi^2) dw
//!
//! The tabulated interior is integrated by the trapezoidal rule in log
//! energy, which matches the log-spaced grids optical data sets ship with.
//! The two ends of the table are closed by analytic pieces selected through
//! [`KkSettings`]: a linear ramp of eps'' down to zero frequency, and an
//! omega^-3 power-law tail above the last point.

use super::{HighEndTail, KkSettings, LowEndExtrapolation, MaterialError, TabulatedEps2};

/// Integral of w * (e1 * w / w1) / (w^2 + xi^2) from 0 to w1, which is
/// (e1 / w1) * (w1 - xi * atan(w1 / xi)). Evaluated through a series when
/// w1 << xi, where the closed form loses all its significant digits.
fn ramp_integral(w1: f64, e1: f64, xi: f64) -> f64 {
    let u = w1 / xi;
    if u < 0.1 {
        // (e1/w1) * xi * (u - atan u) with the atan expanded; the prefactor
        // (e1/w1) * xi * u^3 collapses to e1 * w1^2 / xi^2.
        e1 * w1 * w1 / (xi * xi) * alternating_series(u * u)
    } else {
        (e1 / w1) * (w1 - xi * (w1 / xi).atan())
    }
}

/// Integral of w * eN * (w / wN)^-3 / (w^2 + xi^2) from wN to inf, which is
/// eN * wN^3 / xi^2 * (1/wN - atan(xi/wN) / xi). The small xi/wN branch uses
/// the alternating series of (1 - atan(t)/t) / t^2.
fn cube_tail_integral(wn: f64, en: f64, xi: f64) -> f64 {
    let t = xi / wn;
    if t < 0.1 {
        en * alternating_series(t * t)
    } else {
        en * wn * wn * wn / (xi * xi) * (1.0 / wn - t.atan() / xi)
    }
}

/// (x - atan x) / x^3 as a series in x^2; six terms keep the truncation
/// below 1e-12 of the leading term for x <= 0.1.
fn alternating_series(x2: f64) -> f64 {
    1.0 / 3.0
        + x2 * (-1.0 / 5.0
            + x2 * (1.0 / 7.0
                + x2 * (-1.0 / 9.0 + x2 * (1.0 / 11.0 - x2 / 13.0))))
}

/// Kramers-Kronig transform of `table` at photon energy `xi_ev` > 0.
pub fn kk_to_imaginary_axis(
    table: &TabulatedEps2,
    xi_ev: f64,
    settings: &KkSettings,
) -> Result<f64, MaterialError> {
    if table.is_empty() {
        return Err(MaterialError::EmptyTable);
    }
    if !(xi_ev > 0.0) {
        return Err(MaterialError::NonPositiveFrequency { xi: xi_ev });
    }
    let energies = table.energies_ev();
    let eps2 = table.eps2();
    let xi2 = xi_ev * xi_ev;

    // Interior: substitute x = ln w, so the integrand becomes
    // w^2 eps''(w) / (w^2 + xi^2) on a nearly uniform x grid.
    let mut interior = 0.0;
    let mut previous_x = energies[0].ln();
    let mut previous_g = energies[0] * energies[0] * eps2[0] / (energies[0] * energies[0] + xi2);
    for i in 1..energies.len() {
        let x = energies[i].ln();
        let g = energies[i] * energies[i] * eps2[i] / (energies[i] * energies[i] + xi2);
        interior += 0.5 * (g + previous_g) * (x - previous_x);
        previous_x = x;
        previous_g = g;
    }

    let low = match settings.low_end {
        LowEndExtrapolation::LinearToZero => ramp_integral(energies[0], eps2[0], xi_ev),
        LowEndExtrapolation::Truncate => 0.0,
    };
    let n = energies.len() - 1;
    let high = match settings.high_end {
        HighEndTail::InverseCube => cube_tail_integral(energies[n], eps2[n], xi_ev),
        HighEndTail::Truncate => 0.0,
    };

    Ok(1.0 + std::f64::consts::FRAC_2_PI * (low + interior + high))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::{eps_lorentz, LorentzOscillator};
    use approx::assert_relative_eq;

    /// eps'' on the real axis for a sum of Lorentz oscillators,
    /// f * gamma * w / ((w0^2 - w^2)^2 + gamma^2 w^2). This is the exact
    /// absorption whose transform is eps_lorentz, so sampling it gives an
    /// independent oracle for the numeric transform.
    fn lorentz_eps2(oscillators: &[LorentzOscillator], w: f64) -> f64 {
        oscillators
            .iter()
            .map(|osc| {
                let d = osc.resonance_ev * osc.resonance_ev - w * w;
                osc.strength_ev2 * osc.width_ev * w / (d * d + osc.width_ev * osc.width_ev * w * w)
            })
            .sum()
    }

    fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        let step = (hi / lo).ln() / (count - 1) as f64;
        (0..count).map(|i| lo * (step * i as f64).exp()).collect()
    }

    fn sampled_table(oscillators: &[LorentzOscillator], count: usize) -> TabulatedEps2 {
        let points = log_grid(1e-4, 1e4, count)
            .into_iter()
            .map(|w| (w, lorentz_eps2(oscillators, w)))
            .collect();
        TabulatedEps2::new(points, None).unwrap()
    }

    fn test_oscillators() -> Vec<LorentzOscillator> {
        vec![
            LorentzOscillator {
                strength_ev2: 0.033,
                resonance_ev: 0.14,
                width_ev: 0.05,
            },
            LorentzOscillator {
                strength_ev2: 130.0,
                resonance_ev: 11.0,
                width_ev: 1.0,
            },
        ]
    }

    #[test]
    fn empty_table_is_rejected() {
        let table = TabulatedEps2::new(vec![], None).unwrap();
        assert_eq!(
            kk_to_imaginary_axis(&table, 1.0, &KkSettings::default()).unwrap_err(),
            MaterialError::EmptyTable
        );
    }

    #[test]
    fn nonpositive_frequency_is_rejected() {
        let table = TabulatedEps2::new(vec![(1.0, 0.1)], None).unwrap();
        assert!(kk_to_imaginary_axis(&table, 0.0, &KkSettings::default()).is_err());
    }

    #[test]
    fn transform_of_sampled_lorentz_matches_closed_form() {
        let oscillators = test_oscillators();
        let table = sampled_table(&oscillators, 3000);
        let settings = KkSettings::default();
        for xi in log_grid(1e-2, 1e2, 25) {
            let numeric = kk_to_imaginary_axis(&table, xi, &settings).unwrap();
            let exact = eps_lorentz(&oscillators, xi);
            assert_relative_eq!(numeric, exact, max_relative = 1e-3);
        }
    }

    #[test]
    fn transform_is_monotone_and_transparent_at_high_frequency() {
        let table = sampled_table(&test_oscillators(), 1200);
        let settings = KkSettings::default();
        let mut previous = f64::INFINITY;
        for xi in log_grid(1e-3, 1e5, 40) {
            let eps = kk_to_imaginary_axis(&table, xi, &settings).unwrap();
            assert!(eps > 1.0);
            assert!(eps <= previous * (1.0 + 1e-12));
            previous = eps;
        }
        assert!(previous < 1.001);
    }

    #[test]
    fn truncating_either_end_only_removes_weight() {
        let table = sampled_table(&test_oscillators(), 800);
        let full = kk_to_imaginary_axis(&table, 0.5, &KkSettings::default()).unwrap();
        let no_low = kk_to_imaginary_axis(
            &table,
            0.5,
            &KkSettings {
                low_end: LowEndExtrapolation::Truncate,
                high_end: HighEndTail::InverseCube,
            },
        )
        .unwrap();
        let no_high = kk_to_imaginary_axis(
            &table,
            0.5,
            &KkSettings {
                low_end: LowEndExtrapolation::LinearToZero,
                high_end: HighEndTail::Truncate,
            },
        )
        .unwrap();
        assert!(no_low <= full);
        assert!(no_high < full);
        assert!(no_high >= 1.0);
    }

    #[test]
    fn end_integrals_agree_across_series_switch() {
        // The helpers switch from closed form to a series at u = 0.1; both
        // branches must agree where they meet.
        for u in [0.0999, 0.1001] {
            let xi = 1.0 / u;
            let series_or_direct = ramp_integral(1.0, 0.7, xi);
            let direct = (0.7 / 1.0) * (1.0 - xi * (1.0f64 / xi).atan());
            assert_relative_eq!(series_or_direct, direct, max_relative = 1e-10);
        }
        for t in [0.0999, 0.1001] {
            let wn = 50.0;
            let xi = t * wn;
            let value = cube_tail_integral(wn, 0.3, xi);
            let direct = 0.3 * wn * wn * wn / (xi * xi) * (1.0 / wn - (xi / wn).atan() / xi);
            assert_relative_eq!(value, direct, max_relative = 1e-10);
        }
    }
}
