use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::sparse::SparseComplexMatrix;
use crate::spinops::{site_operator, ChainSpec, SiteOperatorKind};

/// Slack allowed on the rate inequalities before a value counts as negative.
const RATE_SLACK: f64 = 1e-12;

/// Boundary driving and bulk dephasing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BathSpec {
    gamma_drive: f64,
    mu: f64,
    mu_bar: f64,
    gamma_deph: f64,
}

impl BathSpec {
    pub fn new(gamma_drive: f64, mu: f64, mu_bar: f64, gamma_deph: f64) -> Result<Self> {
        if !(gamma_drive > 0.0 && gamma_drive.is_finite()) {
            return invalid(format!("coupling must be positive, got {gamma_drive}"));
        }
        if !(gamma_deph >= 0.0 && gamma_deph.is_finite()) {
            return invalid(format!("dephasing must be non-negative, got {gamma_deph}"));
        }
        if !mu.is_finite() || !mu_bar.is_finite() {
            return invalid("driving parameters must be finite");
        }
        if (mu + mu_bar).abs() > 1.0 + RATE_SLACK {
            return invalid(format!(
                "driving rates must be non-negative: |mu + mu_bar| <= 1 violated (mu = {mu}, mu_bar = {mu_bar})"
            ));
        }
        if (mu - mu_bar).abs() > 1.0 + RATE_SLACK {
            return invalid(format!(
                "driving rates must be non-negative: |mu - mu_bar| <= 1 violated (mu = {mu}, mu_bar = {mu_bar})"
            ));
        }
        Ok(Self {
            gamma_drive,
            mu,
            mu_bar,
            gamma_deph,
        })
    }

    pub fn gamma_drive(&self) -> f64 {
        self.gamma_drive
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn mu_bar(&self) -> f64 {
        self.mu_bar
    }

    pub fn gamma_deph(&self) -> f64 {
        self.gamma_deph
    }

    /// Rates of `L_1..L_4`: (σ⁺ left, σ⁻ left, σ⁺ right, σ⁻ right).
    pub fn driving_rates(&self) -> [f64; 4] {
        let g = self.gamma_drive;
        let (mu, mb) = (self.mu, self.mu_bar);
        [
            g * (1.0 - mu + mb),
            g * (1.0 + mu - mb),
            g * (1.0 + mu + mb),
            g * (1.0 - mu - mb),
        ]
        .map(|r| r.max(0.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainModel {
    pub chain: ChainSpec,
    pub bath: BathSpec,
}

impl ChainModel {
    pub fn new(chain: ChainSpec, bath: BathSpec) -> Self {
        Self { chain, bath }
    }

    pub fn n(&self) -> usize {
        self.chain.n()
    }
}

/// One Lindblad operator with its amplitude already folded into `matrix`.
#[derive(Debug, Clone)]
pub struct JumpOperator {
    pub label: String,
    pub site: usize,
    pub kind: SiteOperatorKind,
    pub amplitude: f64,
    pub matrix: SparseComplexMatrix,
}

/// Driving operators `L_1..L_4` (zero-rate ones omitted) followed by one
/// dephasing operator `√(γ/2) σᶻ_j` per site when `γ > 0`.
pub fn build_jump_operators(model: &ChainModel) -> Result<Vec<JumpOperator>> {
    let n = model.n();
    let rates = model.bath.driving_rates();
    let slots = [
        ("L1", 1, SiteOperatorKind::Plus),
        ("L2", 1, SiteOperatorKind::Minus),
        ("L3", n, SiteOperatorKind::Plus),
        ("L4", n, SiteOperatorKind::Minus),
    ];
    let mut out = Vec::with_capacity(4 + n);
    for ((label, site, kind), rate) in slots.into_iter().zip(rates) {
        if rate == 0.0 {
            continue;
        }
        let amplitude = rate.sqrt();
        out.push(JumpOperator {
            label: label.to_string(),
            site,
            kind,
            amplitude,
            matrix: site_operator(kind, site, n)?.scale(C64::new(amplitude, 0.0)),
        });
    }
    let gamma = model.bath.gamma_deph();
    if gamma > 0.0 {
        let amplitude = (gamma / 2.0).sqrt();
        for site in 1..=n {
            out.push(JumpOperator {
                label: format!("deph{site}"),
                site,
                kind: SiteOperatorKind::Z,
                amplitude,
                matrix: site_operator(SiteOperatorKind::Z, site, n)?
                    .scale(C64::new(amplitude, 0.0)),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize, g: f64, mu: f64, mb: f64, gd: f64) -> ChainModel {
        ChainModel::new(
            ChainSpec::uniform(n, 0.0).unwrap(),
            BathSpec::new(g, mu, mb, gd).unwrap(),
        )
    }

    #[test]
    fn maximal_driving_keeps_two_operators() {
        let jumps = build_jump_operators(&model(4, 0.1, 1.0, 0.0, 0.0)).unwrap();
        assert_eq!(jumps.len(), 2);
        assert_eq!(jumps[0].label, "L2");
        assert_eq!((jumps[0].site, jumps[0].kind), (1, SiteOperatorKind::Minus));
        assert!((jumps[0].amplitude - 0.2f64.sqrt()).abs() < 1e-15);
        assert_eq!(jumps[1].label, "L3");
        assert_eq!((jumps[1].site, jumps[1].kind), (4, SiteOperatorKind::Plus));
        assert!((jumps[1].amplitude - 0.2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn equilibrium_rates_are_all_gamma() {
        let jumps = build_jump_operators(&model(3, 1.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(jumps.len(), 4);
        assert!(jumps.iter().all(|j| (j.amplitude - 1.0).abs() < 1e-15));
    }

    #[test]
    fn dephasing_adds_one_operator_per_site() {
        let jumps = build_jump_operators(&model(3, 1.0, 0.0, 0.0, 1.0)).unwrap();
        let deph: Vec<_> = jumps.iter().filter(|j| j.kind == SiteOperatorKind::Z).collect();
        assert_eq!(deph.len(), 3);
        for (k, j) in deph.iter().enumerate() {
            assert_eq!(j.site, k + 1);
            assert!((j.amplitude - 0.5f64.sqrt()).abs() < 1e-15);
            let z = site_operator(SiteOperatorKind::Z, k + 1, 3).unwrap();
            assert!(j.matrix.max_abs_diff(&z.scale(C64::new(0.5f64.sqrt(), 0.0))) < 1e-15);
        }
    }

    #[test]
    fn negative_rates_are_rejected_with_the_inequality() {
        let err = BathSpec::new(1.0, 0.5, 0.6, 0.0).unwrap_err().to_string();
        assert!(err.contains("|mu + mu_bar| <= 1"), "{err}");
        let err = BathSpec::new(1.0, 0.5, -0.6, 0.0).unwrap_err().to_string();
        assert!(err.contains("|mu - mu_bar| <= 1"), "{err}");
        assert!(BathSpec::new(0.0, 0.0, 0.0, 0.0).is_err());
        assert!(BathSpec::new(1.0, 0.0, 0.0, -0.1).is_err());
    }
}
