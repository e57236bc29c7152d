//! Single-symbol training with sample-wise IRS reflection switching.
//!
//! Switching the reflections every sample makes the effective channel
//! linear time-variant within one OFDM symbol. After CP removal the received
//! samples are `y = X d + sum_m Theta_m X q_m + v = Xi lambda + v`, where
//! `X` holds the first `L` cyclic shifts of the pilot and `Theta_m` is the
//! diagonal of sample-wise reflections of sub-surface `m`.
//!
//! The model is exact when the IRS to user link has a single tap. With more
//! taps the reflection no longer commutes with that link, which
//! [`RxModel::Physical`] reproduces and [`RxModel::Idealized`] ignores.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{cascade, check_unit_modulus, complex_gaussian, ChannelRealization, LinkSet};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{circular_convolve, cyclic_shift, ls_solve, ComplexMatrix, LeastSquares};
use crate::training::Scheme2Design;

/// `N x L` matrix whose column `l` is the pilot cyclically shifted down by `l`.
pub fn build_pilot_circulant(x: &[Complex64], l: usize) -> Result<ComplexMatrix> {
    if l == 0 || l > x.len() {
        return Err(Error::InvalidDimension(format!(
            "cannot take {l} cyclic shifts of a length-{} pilot",
            x.len()
        )));
    }
    let shifts: Vec<Vec<Complex64>> = (0..l).map(|k| cyclic_shift(x, k as i64)).collect();
    ComplexMatrix::from_columns(&shifts)
}

/// `Xi = [Theta_0 X, Theta_1 X, ..., Theta_M X]`, `N x L(M+1)`.
pub fn build_xi(design: &Scheme2Design) -> Result<ComplexMatrix> {
    let n = design.len();
    let l = design.delay_spread;
    let blocks = design.num_subsurfaces() + 1;
    if design.theta.cols() != n {
        return Err(Error::InvalidDimension(format!(
            "reflection table has {} samples, pilot has {n}",
            design.theta.cols()
        )));
    }
    if n < l * blocks {
        return Err(Error::InsufficientLength {
            n,
            required: l * blocks,
        });
    }
    let x = build_pilot_circulant(&design.x, l)?;
    Ok(ComplexMatrix::from_fn(n, l * blocks, |r, c| {
        let (m, k) = (c / l, c % l);
        design.theta[(m, r)] * x[(r, k)]
    }))
}

/// Which receive model to simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RxModel {
    /// `y = Xi lambda + v` with `lambda` taken from the cascaded channel.
    Idealized,
    /// Reflection applied at the IRS between the two link convolutions.
    Physical,
}

#[derive(Debug, Clone)]
pub struct Scheme2Observation {
    pub y: Vec<Complex64>,
    /// Set when the idealized model was used on a multi-tap IRS to user link.
    pub model_mismatch: bool,
}

/// Stacked estimate `[d^; q^_1; ...; q^_M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StackedEstimate {
    pub lambda_hat: Vec<Complex64>,
    pub delay_spread: usize,
}

impl StackedEstimate {
    pub fn squared_error(&self, truth: &ChannelRealization) -> Result<f64> {
        let lambda = truth.stacked();
        if lambda.len() != self.lambda_hat.len() {
            return Err(Error::InvalidDimension("estimate and truth differ in length".into()));
        }
        Ok(self
            .lambda_hat
            .iter()
            .zip(&lambda)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum())
    }

    /// Block `m` (0 = direct link) of length `L`.
    pub fn block(&self, m: usize) -> &[Complex64] {
        let l = self.delay_spread;
        &self.lambda_hat[m * l..(m + 1) * l]
    }
}

pub fn simulate_rx_scheme2<R: Rng + ?Sized>(
    design: &Scheme2Design,
    links: &LinkSet,
    sigma2: f64,
    rng: &mut R,
    model: RxModel,
) -> Result<Scheme2Observation> {
    let m = design.num_subsurfaces();
    if links.num_subsurfaces() != m {
        return Err(Error::InvalidDimension(format!(
            "design has {m} sub-surfaces, links have {}",
            links.num_subsurfaces()
        )));
    }
    check_unit_modulus(design.theta.as_slice())?;
    let multi_tap = links.u.iter().any(|u| u.len() > 1);
    let mut y = match model {
        RxModel::Idealized => {
            let realization = cascade(links, design.delay_spread)?;
            build_xi(design)?.mul_vec(&realization.stacked())?
        }
        RxModel::Physical => physical_rx(design, links)?,
    };
    if sigma2 > 0.0 {
        for v in &mut y {
            *v += complex_gaussian(rng, sigma2);
        }
    }
    Ok(Scheme2Observation {
        y,
        model_mismatch: model == RxModel::Idealized && multi_tap,
    })
}

/// Noiseless received samples with the reflection applied between `g_m`
/// and `u_m`:
/// `r_m[n] = sum_k u_m[k] theta_m^(n-k) w_m[n-k]`, `w_m = x (*) g_m`.
fn physical_rx(design: &Scheme2Design, links: &LinkSet) -> Result<Vec<Complex64>> {
    let n = design.len();
    let mut y = circular_convolve(&design.x, &links.d)?;
    for (idx, (g, u)) in links.g.iter().zip(&links.u).enumerate() {
        let m = idx + 1;
        let w = circular_convolve(&design.x, g)?;
        let reflected: Vec<Complex64> = (0..n)
            .map(|k| design.reflection(m, k as i64) * w[k])
            .collect();
        let r = circular_convolve(&reflected, u)?;
        for (acc, v) in y.iter_mut().zip(r) {
            *acc += v;
        }
    }
    Ok(y)
}

/// LS estimator for a fixed Scheme 2 design.
///
/// For an orthogonal design `Xi^dagger = Xi^H / (gamma2 N)`; otherwise a QR
/// factorization of `Xi` is computed once and reused.
#[derive(Debug, Clone)]
pub struct Scheme2Estimator {
    xi: ComplexMatrix,
    gamma2: f64,
    delay_spread: usize,
    qr: Option<LeastSquares>,
}

impl Scheme2Estimator {
    pub fn new(design: &Scheme2Design) -> Result<Self> {
        if design.is_orthogonal()? {
            Ok(Self {
                xi: build_xi(design)?,
                gamma2: design.gamma2,
                delay_spread: design.delay_spread,
                qr: None,
            })
        } else {
            Self::general(design)
        }
    }

    /// Always uses the general solver, skipping the orthogonality test.
    pub fn general(design: &Scheme2Design) -> Result<Self> {
        let xi = build_xi(design)?;
        let qr = LeastSquares::new(&xi)?;
        Ok(Self {
            xi,
            gamma2: design.gamma2,
            delay_spread: design.delay_spread,
            qr: Some(qr),
        })
    }

    pub fn xi(&self) -> &ComplexMatrix {
        &self.xi
    }

    pub fn uses_closed_form(&self) -> bool {
        self.qr.is_none()
    }

    pub fn estimate(&self, y: &[Complex64]) -> Result<StackedEstimate> {
        match &self.qr {
            None => self.estimate_closed_form(y),
            Some(qr) => Ok(StackedEstimate {
                lambda_hat: qr.solve_vec(y)?,
                delay_spread: self.delay_spread,
            }),
        }
    }

    /// `Xi^H y / (gamma2 N)`.
    pub fn estimate_closed_form(&self, y: &[Complex64]) -> Result<StackedEstimate> {
        let scale = 1.0 / (self.gamma2 * self.xi.rows() as f64);
        let lambda_hat = self
            .xi
            .adjoint()
            .mul_vec(y)?
            .into_iter()
            .map(|v| v * scale)
            .collect();
        Ok(StackedEstimate {
            lambda_hat,
            delay_spread: self.delay_spread,
        })
    }

    /// `sigma2 / (L(M+1)) tr{(Xi^H Xi)^-1}`.
    pub fn analytic_mse(&self, sigma2: f64) -> f64 {
        let coeffs = self.xi.cols() as f64;
        let trace = match &self.qr {
            None => coeffs / (self.gamma2 * self.xi.rows() as f64),
            Some(qr) => qr.trace_inverse_gram(),
        };
        sigma2 / coeffs * trace
    }
}

pub fn estimate_scheme2(design: &Scheme2Design, y: &[Complex64]) -> Result<StackedEstimate> {
    Scheme2Estimator::new(design)?.estimate(y)
}

/// LS estimate through the general solver regardless of the design.
pub fn estimate_scheme2_general(design: &Scheme2Design, y: &[Complex64]) -> Result<StackedEstimate> {
    let xi = build_xi(design)?;
    let rhs = ComplexMatrix::from_columns(&[y.to_vec()])?;
    Ok(StackedEstimate {
        lambda_hat: ls_solve(&xi, &rhs)?.column(0),
        delay_spread: design.delay_spread,
    })
}

pub fn analytic_mse_scheme2(design: &Scheme2Design, sigma2: f64, l: usize, m: usize) -> Result<f64> {
    if l != design.delay_spread || m != design.num_subsurfaces() {
        return Err(Error::InvalidDimension(format!(
            "design is for L={}, M={}, asked for L={l}, M={m}",
            design.delay_spread,
            design.num_subsurfaces()
        )));
    }
    Ok(Scheme2Estimator::new(design)?.analytic_mse(sigma2))
}

/// MSE gain of Scheme 2 over Scheme 1 in dB, `10 log10(gamma2 N / (gamma1 (M+1)))`.
pub fn mse_gain_db(gamma1: f64, gamma2: f64, n: usize, m: usize) -> f64 {
    10.0 * (gamma2 * n as f64 / (gamma1 * (m + 1) as f64)).log10()
}

/// Training time in sampling periods, `N + L_cp`.
pub fn training_duration_scheme2(config: &SystemConfig) -> usize {
    config.training_duration_scheme2()
}
