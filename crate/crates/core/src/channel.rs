//! Random multipath link generation and the cascaded channel model.
//!
//! The direct and BS to IRS links are Rayleigh with an exponential power delay
//! profile. The IRS to user link is Rician: its first tap is the LoS component
//! with a uniformly random phase, the remaining taps are Rayleigh.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::numerics::{cis, linear_convolve, ComplexMatrix};

/// Tolerance on `|theta| = 1` for reflection coefficients.
pub const UNIT_MODULUS_TOLERANCE: f64 = 1e-9;

/// `gamma0 * D^-alpha`.
pub fn path_gain(gamma0: f64, distance: f64, alpha: f64) -> Result<f64> {
    if !(gamma0 > 0.0 && distance > 0.0 && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "path gain needs positive arguments, got gamma0={gamma0}, D={distance}, alpha={alpha}"
        )));
    }
    Ok(gamma0 * distance.powf(-alpha))
}

/// Exponential power delay profile `p[l] ~ exp(-l / decay)`, normalized to
/// unit sum.
pub fn exp_pdp(taps: usize, decay: f64) -> Result<Vec<f64>> {
    if taps == 0 {
        return Err(Error::InvalidParameter("power delay profile needs at least one tap".into()));
    }
    if !(decay > 0.0) {
        return Err(Error::InvalidParameter(format!("decay must be positive, got {decay}")));
    }
    let raw: Vec<f64> = (0..taps).map(|l| (-(l as f64) / decay).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|p| p / total).collect())
}

/// Circularly-symmetric complex Gaussian sample with the given variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im) * (variance / 2.0).sqrt()
}

/// Unit-modulus sample with phase uniform on `[0, 2 pi)`.
pub fn random_phase<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    cis(2.0 * PI * rng.random::<f64>())
}

pub fn sample_rayleigh_link<R: Rng + ?Sized>(
    profile: &[f64],
    total_gain: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    profile
        .iter()
        .map(|p| complex_gaussian(rng, total_gain * p))
        .collect()
}

/// Rician link: tap 0 carries `total_gain * kappa / (kappa + 1)` as a
/// random-phase LoS component, taps `1..` share `total_gain / (kappa + 1)`
/// according to the profile renormalized over those taps.
///
/// A single-tap link has no NLoS taps and carries the whole gain in the LoS
/// tap.
pub fn sample_rician_link<R: Rng + ?Sized>(
    profile: &[f64],
    total_gain: f64,
    kappa: f64,
    rng: &mut R,
) -> Vec<Complex64> {
    if profile.len() <= 1 {
        return profile
            .iter()
            .map(|_| random_phase(rng) * total_gain.sqrt())
            .collect();
    }
    let los_power = total_gain * kappa / (kappa + 1.0);
    let nlos_power = total_gain / (kappa + 1.0);
    let tail: f64 = profile[1..].iter().sum();
    let mut taps = Vec::with_capacity(profile.len());
    taps.push(random_phase(rng) * los_power.sqrt());
    for p in &profile[1..] {
        taps.push(complex_gaussian(rng, nlos_power * p / tail));
    }
    taps
}

/// Raw per-link channel impulse responses for one realization.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSet {
    /// BS to user, length `Ld`.
    pub d: Vec<Complex64>,
    /// BS to sub-surface `m`, each of length `L1`.
    pub g: Vec<Vec<Complex64>>,
    /// Sub-surface `m` to user, each of length `L2`.
    pub u: Vec<Vec<Complex64>>,
}

impl LinkSet {
    pub fn num_subsurfaces(&self) -> usize {
        self.g.len()
    }
}

/// Link gains `(direct, BS->sub-surface, sub-surface->user)`.
///
/// The `mu` elements of a sub-surface add coherently on the BS to IRS side,
/// so `E|g_m|^2 = mu * gamma0 * D2^-alpha2`.
pub fn link_gains(config: &SystemConfig) -> Result<(f64, f64, f64)> {
    let direct = path_gain(config.gamma0, config.d3, config.alpha3)?;
    let bs_irs = config.mu() as f64 * path_gain(config.gamma0, config.d2, config.alpha2)?;
    let irs_user = path_gain(config.gamma0, config.d1, config.alpha1)?;
    Ok((direct, bs_irs, irs_user))
}

pub fn sample_link_set<R: Rng + ?Sized>(config: &SystemConfig, rng: &mut R) -> Result<LinkSet> {
    let (direct, bs_irs, irs_user) = link_gains(config)?;
    let pdp_d = exp_pdp(config.ld, config.decay)?;
    let pdp_g = exp_pdp(config.l1, config.decay)?;
    let pdp_u = exp_pdp(config.l2, config.decay)?;
    let d = sample_rayleigh_link(&pdp_d, direct, rng);
    let mut g = Vec::with_capacity(config.m);
    let mut u = Vec::with_capacity(config.m);
    for _ in 0..config.m {
        g.push(sample_rayleigh_link(&pdp_g, bs_irs, rng));
        u.push(sample_rician_link(&pdp_u, irs_user, config.kappa, rng));
    }
    Ok(LinkSet { d, g, u })
}

/// Direct CIR and cascaded channel matrix, both zero-padded to `L` taps.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub d: Vec<Complex64>,
    /// `L x M`; column `m` is `g_m * u_m`.
    pub q: ComplexMatrix,
}

impl ChannelRealization {
    pub fn delay_spread(&self) -> usize {
        self.d.len()
    }

    pub fn num_subsurfaces(&self) -> usize {
        self.q.cols()
    }

    /// Stacked `[d; q_1; ...; q_M]`.
    pub fn stacked(&self) -> Vec<Complex64> {
        let mut out = self.d.clone();
        for m in 0..self.q.cols() {
            out.extend(self.q.column(m));
        }
        out
    }

    /// `[d, Q]` as an `L x (M+1)` matrix.
    pub fn augmented(&self) -> ComplexMatrix {
        let l = self.d.len();
        ComplexMatrix::from_fn(l, self.q.cols() + 1, |r, c| {
            if c == 0 {
                self.d[r]
            } else {
                self.q[(r, c - 1)]
            }
        })
    }

    /// `||[d, Q]||_F^2`.
    pub fn power(&self) -> f64 {
        self.d.iter().map(Complex64::norm_sqr).sum::<f64>() + self.q.frobenius_norm_sqr()
    }
}

fn zero_pad(v: &[Complex64], len: usize) -> Vec<Complex64> {
    let mut out = v.to_vec();
    out.resize(len, Complex64::new(0.0, 0.0));
    out
}

/// Forms `q_m = g_m * u_m` and zero-pads everything to `l` taps.
pub fn cascade(links: &LinkSet, l: usize) -> Result<ChannelRealization> {
    if links.g.len() != links.u.len() {
        return Err(Error::InvalidDimension(format!(
            "{} BS->IRS links but {} IRS->user links",
            links.g.len(),
            links.u.len()
        )));
    }
    if links.d.len() > l {
        return Err(Error::InvalidDimension(format!(
            "direct link has {} taps, more than L = {l}",
            links.d.len()
        )));
    }
    let mut q = ComplexMatrix::zeros(l, links.g.len());
    for (m, (g, u)) in links.g.iter().zip(&links.u).enumerate() {
        let qm = linear_convolve(g, u)?;
        if qm.len() > l {
            return Err(Error::InvalidDimension(format!(
                "cascaded link has {} taps, more than L = {l}",
                qm.len()
            )));
        }
        q.set_column(m, &zero_pad(&qm, l));
    }
    Ok(ChannelRealization {
        d: zero_pad(&links.d, l),
        q,
    })
}

pub(crate) fn check_unit_modulus(values: &[Complex64]) -> Result<()> {
    for (index, t) in values.iter().enumerate() {
        let modulus = t.norm();
        if (modulus - 1.0).abs() > UNIT_MODULUS_TOLERANCE {
            return Err(Error::InvalidReflection { index, modulus });
        }
    }
    Ok(())
}

/// Superimposed CIR `h = d + Q theta`.
pub fn effective_cir(realization: &ChannelRealization, theta: &[Complex64]) -> Result<Vec<Complex64>> {
    check_unit_modulus(theta)?;
    let qt = realization.q.mul_vec(theta)?;
    Ok(realization.d.iter().zip(qt).map(|(d, q)| d + q).collect())
}
