use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erf;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Poisson,
    Goe,
    Gue,
}

impl Ensemble {
    pub const ALL: [Ensemble; 3] = [Ensemble::Poisson, Ensemble::Goe, Ensemble::Gue];

    pub fn name(self) -> &'static str {
        match self {
            Ensemble::Poisson => "poisson",
            Ensemble::Goe => "goe",
            Ensemble::Gue => "gue",
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check(s: f64) -> Result<()> {
    if !(s >= 0.0) {
        return invalid(format!("spacing must be non-negative, got {s}"));
    }
    Ok(())
}

/// Nearest-neighbour spacing density: `e^{-s}`, `(π/2) s e^{-πs²/4}` or
/// `(32/π²) s² e^{-4s²/π}`.
pub fn surmise_pdf(e: Ensemble, s: f64) -> Result<f64> {
    check(s)?;
    Ok(match e {
        Ensemble::Poisson => (-s).exp(),
        Ensemble::Goe => 0.5 * PI * s * (-0.25 * PI * s * s).exp(),
        Ensemble::Gue => 32.0 / (PI * PI) * s * s * (-4.0 * s * s / PI).exp(),
    })
}

pub fn surmise_cdf(e: Ensemble, s: f64) -> Result<f64> {
    check(s)?;
    Ok(cdf(e, s))
}

pub(crate) fn cdf(e: Ensemble, s: f64) -> f64 {
    match e {
        Ensemble::Poisson => -(-s).exp_m1(),
        Ensemble::Goe => -(-0.25 * PI * s * s).exp_m1(),
        Ensemble::Gue => {
            erf(2.0 * s / PI.sqrt()) - 4.0 * s / PI * (-4.0 * s * s / PI).exp()
        }
    }
}

/// Inverse CDF for `u ∈ [0, 1)`.
pub fn surmise_quantile(e: Ensemble, u: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&u) {
        return invalid(format!("quantile level must lie in [0, 1), got {u}"));
    }
    Ok(match e {
        Ensemble::Poisson => -(-u).ln_1p(),
        Ensemble::Goe => (-4.0 * (-u).ln_1p() / PI).sqrt(),
        Ensemble::Gue => {
            let (mut lo, mut hi) = (0.0, 1.0);
            while cdf(e, hi) < u {
                hi *= 2.0;
            }
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if cdf(e, mid) < u {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if hi - lo <= 1e-15 * hi.max(1e-300) {
                    break;
                }
            }
            0.5 * (lo + hi)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn quoted_values() {
        assert_abs_diff_eq!(surmise_pdf(Ensemble::Poisson, 2f64.ln()).unwrap(), 0.5, epsilon = 1e-15);
        let gue1 = 32.0 / (PI * PI) * (-4.0 / PI).exp();
        assert_abs_diff_eq!(surmise_pdf(Ensemble::Gue, 1.0).unwrap(), gue1, epsilon = 1e-15);
        assert_abs_diff_eq!(gue1, 0.9076, epsilon = 1e-4);
        assert_eq!(surmise_pdf(Ensemble::Gue, 0.0).unwrap(), 0.0);
        assert_eq!(surmise_pdf(Ensemble::Poisson, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(
            surmise_cdf(Ensemble::Poisson, 1.0).unwrap(),
            1.0 - (-1f64).exp(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn cdf_endpoints() {
        for e in Ensemble::ALL {
            assert_eq!(surmise_cdf(e, 0.0).unwrap(), 0.0);
        }
        for e in [Ensemble::Goe, Ensemble::Gue] {
            assert!((surmise_cdf(e, 10.0).unwrap() - 1.0).abs() < 1e-9);
        }
        // the exponential tail is still e^-10 at s = 10
        let tail = 1.0 - surmise_cdf(Ensemble::Poisson, 10.0).unwrap();
        assert!((tail - (-10f64).exp()).abs() < 1e-15);
        assert!((surmise_cdf(Ensemble::Poisson, 25.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn negative_spacing_is_rejected() {
        for e in Ensemble::ALL {
            assert!(surmise_pdf(e, -0.1).is_err());
            assert!(surmise_cdf(e, -0.1).is_err());
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for e in Ensemble::ALL {
            for k in 0..100 {
                let u = k as f64 / 100.0;
                let s = surmise_quantile(e, u).unwrap();
                assert!((cdf(e, s) - u).abs() < 1e-12, "{e} {u}");
            }
        }
    }
}
