//! Short-OFDM-symbol training with symbol-wise IRS reflection switching.
//!
//! With a CP of at least `L` samples, the `i`-th received short symbol in the
//! frequency domain is `z_i = S F (d + Q theta_i) + v_i`. Stacking the `I0`
//! symbols gives `Z = S~ [d, Q] Psi + V`, which is inverted from both sides.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{complex_gaussian, ChannelRealization};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{pseudo_inverse, right_ls_solve, ComplexMatrix};
use crate::training::Scheme1Design;

/// Received frequency-domain short symbols, one per column (`N0 x I0`).
#[derive(Debug, Clone)]
pub struct Scheme1Observation {
    pub z: ComplexMatrix,
}

/// Estimated direct CIR and cascaded channel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub d_hat: Vec<Complex64>,
    /// `L x M`.
    pub q_hat: ComplexMatrix,
}

impl ChannelEstimate {
    /// Splits an `L x (M+1)` matrix `[d, Q]`.
    pub fn from_augmented(m: &ComplexMatrix) -> Self {
        Self {
            d_hat: m.column(0),
            q_hat: ComplexMatrix::from_fn(m.rows(), m.cols() - 1, |r, c| m[(r, c + 1)]),
        }
    }

    /// `||[d^, Q^] - [d, Q]||_F^2`.
    pub fn squared_error(&self, truth: &ChannelRealization) -> Result<f64> {
        if self.d_hat.len() != truth.d.len() || self.q_hat.cols() != truth.q.cols() {
            return Err(Error::InvalidDimension("estimate and truth differ in shape".into()));
        }
        let d_err: f64 = self
            .d_hat
            .iter()
            .zip(&truth.d)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok(d_err + self.q_hat.sub(&truth.q)?.frobenius_norm_sqr())
    }
}

/// Noisy reception of the `I0` training symbols.
pub fn simulate_rx_scheme1<R: Rng + ?Sized>(
    design: &Scheme1Design,
    realization: &ChannelRealization,
    sigma2: f64,
    rng: &mut R,
) -> Result<Scheme1Observation> {
    if realization.delay_spread() != design.delay_spread
        || realization.num_subsurfaces() != design.num_subsurfaces()
    {
        return Err(Error::InvalidDimension(format!(
            "design is for L={}, M={} but channel has L={}, M={}",
            design.delay_spread,
            design.num_subsurfaces(),
            realization.delay_spread(),
            realization.num_subsurfaces()
        )));
    }
    let s_tilde = design.pilot_matrix()?;
    let mut z = s_tilde.matmul(&realization.augmented().matmul(&design.psi)?)?;
    if sigma2 > 0.0 {
        for r in 0..z.rows() {
            for c in 0..z.cols() {
                z[(r, c)] += complex_gaussian(rng, sigma2);
            }
        }
    }
    Ok(Scheme1Observation { z })
}

/// LS estimator for a fixed design.
///
/// Orthogonal designs use the scaled adjoints `S~^H / gamma1` and
/// `Psi^H / I0`; anything else goes through the general LS solver.
#[derive(Debug, Clone)]
pub struct Scheme1Estimator {
    s_tilde: ComplexMatrix,
    psi: ComplexMatrix,
    gamma1: f64,
    /// `(S~^dagger, Psi^dagger)` for non-orthogonal designs.
    pinv: Option<(ComplexMatrix, ComplexMatrix)>,
}

impl Scheme1Estimator {
    pub fn new(design: &Scheme1Design) -> Result<Self> {
        let s_tilde = design.pilot_matrix()?;
        let pinv = if design.is_orthogonal() {
            None
        } else {
            Some(general_pseudo_inverses(&s_tilde, &design.psi)?)
        };
        Ok(Self {
            s_tilde,
            psi: design.psi.clone(),
            gamma1: design.gamma1,
            pinv,
        })
    }

    pub fn uses_closed_form(&self) -> bool {
        self.pinv.is_none()
    }

    pub fn estimate(&self, obs: &Scheme1Observation) -> Result<ChannelEstimate> {
        match &self.pinv {
            None => self.estimate_closed_form(obs),
            Some((s_pinv, psi_pinv)) => {
                let m = s_pinv.matmul(&obs.z)?.matmul(psi_pinv)?;
                Ok(ChannelEstimate::from_augmented(&m))
            }
        }
    }

    /// `S~^H Z Psi^H / (gamma1 I0)`. Exact only for orthogonal designs.
    pub fn estimate_closed_form(&self, obs: &Scheme1Observation) -> Result<ChannelEstimate> {
        let scale = 1.0 / (self.gamma1 * self.psi.cols() as f64);
        let m = self
            .s_tilde
            .adjoint()
            .matmul(&obs.z)?
            .matmul(&self.psi.adjoint())?
            .scale(scale);
        Ok(ChannelEstimate::from_augmented(&m))
    }

    /// Per-coefficient MSE `sigma2 / (L(M+1)) tr{(S~^H S~)^-1} tr{(Psi Psi^H)^-1}`.
    pub fn analytic_mse(&self, sigma2: f64) -> Result<f64> {
        let l = self.s_tilde.cols();
        let m1 = self.psi.rows();
        let (tr_s, tr_psi) = match &self.pinv {
            None => (l as f64 / self.gamma1, m1 as f64 / self.psi.cols() as f64),
            Some((s_pinv, psi_pinv)) => (s_pinv.frobenius_norm_sqr(), psi_pinv.frobenius_norm_sqr()),
        };
        Ok(sigma2 / (l * m1) as f64 * tr_s * tr_psi)
    }
}

fn general_pseudo_inverses(
    s_tilde: &ComplexMatrix,
    psi: &ComplexMatrix,
) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let s_pinv = pseudo_inverse(s_tilde)?;
    let psi_pinv = right_ls_solve(&ComplexMatrix::identity(psi.cols()), psi)?;
    Ok((s_pinv, psi_pinv))
}

/// LS estimate `S~^dagger Z Psi^dagger`, using the closed form when the
/// design is orthogonal.
pub fn estimate_scheme1(design: &Scheme1Design, obs: &Scheme1Observation) -> Result<ChannelEstimate> {
    Scheme1Estimator::new(design)?.estimate(obs)
}

/// LS estimate through the general solver regardless of the design.
pub fn estimate_scheme1_general(
    design: &Scheme1Design,
    obs: &Scheme1Observation,
) -> Result<ChannelEstimate> {
    let s_tilde = design.pilot_matrix()?;
    let (s_pinv, psi_pinv) = general_pseudo_inverses(&s_tilde, &design.psi)?;
    Ok(ChannelEstimate::from_augmented(&s_pinv.matmul(&obs.z)?.matmul(&psi_pinv)?))
}

pub fn analytic_mse_scheme1(design: &Scheme1Design, sigma2: f64) -> Result<f64> {
    Scheme1Estimator::new(design)?.analytic_mse(sigma2)
}

/// Analytic MSE through explicit pseudo-inverses, skipping the closed form.
pub fn analytic_mse_scheme1_general(design: &Scheme1Design, sigma2: f64) -> Result<f64> {
    let s_tilde = design.pilot_matrix()?;
    let (s_pinv, psi_pinv) = general_pseudo_inverses(&s_tilde, &design.psi)?;
    let coeffs = (s_tilde.cols() * design.psi.rows()) as f64;
    Ok(sigma2 / coeffs * s_pinv.frobenius_norm_sqr() * psi_pinv.frobenius_norm_sqr())
}

/// Training time in sampling periods, `I0 (N0 + L_cp)`.
pub fn training_duration_scheme1(config: &SystemConfig) -> usize {
    config.training_duration_scheme1()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{cascade, sample_link_set};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_form_mse_values() {
        let cfg = SystemConfig::default();
        let d = Scheme1Design::optimal(&cfg, 1.0).unwrap();
        assert!((analytic_mse_scheme1(&d, 1.0).unwrap() - 1.0 / 16.0).abs() < 1e-15);

        let small = SystemConfig {
            n: 16,
            m: 1,
            m0: 1,
            i0: 2,
            ..cfg
        };
        let d = Scheme1Design::optimal(&small, 4.0).unwrap();
        assert!((analytic_mse_scheme1(&d, 2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!((analytic_mse_scheme1_general(&d, 2.0).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn direct_only_noiseless() {
        let cfg = SystemConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut real = cascade(&sample_link_set(&cfg, &mut rng).unwrap(), 8).unwrap();
        real.q = ComplexMatrix::zeros(8, cfg.m);
        let mut d = Scheme1Design::optimal(&cfg, 0.5).unwrap();
        d.psi = ComplexMatrix::from_fn(cfg.m + 1, cfg.i0, |_, _| Complex64::new(1.0, 0.0));
        let obs = simulate_rx_scheme1(&d, &real, 0.0, &mut rng).unwrap();
        let expected = d.pilot_matrix().unwrap().mul_vec(&real.d).unwrap();
        for col in 0..cfg.i0 {
            for (a, b) in obs.z.column(col).iter().zip(&expected) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rejects_mismatched_channel() {
        let cfg = SystemConfig::default();
        let d = Scheme1Design::optimal(&cfg, 1.0).unwrap();
        let real = ChannelRealization {
            d: vec![Complex64::new(0.0, 0.0); 4],
            q: ComplexMatrix::zeros(4, cfg.m),
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            simulate_rx_scheme1(&d, &real, 1.0, &mut rng),
            Err(Error::InvalidDimension(_))
        ));
    }
}
