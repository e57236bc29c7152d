//! Pilot signals and IRS training reflection patterns.
//!
//! Scheme 1 transmits `I0` short OFDM symbols with a frequency-domain pilot
//! `s` and switches the IRS once per symbol according to the columns of `Psi`.
//! Scheme 2 transmits a single full OFDM symbol `x` and switches the IRS every
//! sample according to a reflection table `theta[m][n]`.
//!
//! The optimal designs are an equipowered `s` with a DFT `Psi`, and a
//! Zadoff-Chu `x` with `theta_m^(n) = x_{n-mL} / x_n`. Both make the
//! respective LS problems perfectly orthogonal.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::random_phase;
use crate::config::{gcd, SystemConfig};
use crate::error::{Error, Result};
use crate::numerics::{cis, dft_matrix, first_columns, ComplexMatrix};
use crate::scheme2::build_xi;

/// Frequency-domain short-symbol pilot and per-symbol reflection pattern.
#[derive(Debug, Clone)]
pub struct Scheme1Design {
    /// Pilot on each of the `N0` subcarriers.
    pub s: Vec<Complex64>,
    /// `(M+1) x I0`; row 0 belongs to the direct link and is all ones.
    pub psi: ComplexMatrix,
    /// Average per-subcarrier power.
    pub gamma1: f64,
    /// Channel delay spread `L` the design is built for.
    pub delay_spread: usize,
}

/// Time-domain pilot and per-sample reflection table.
#[derive(Debug, Clone)]
pub struct Scheme2Design {
    pub x: Vec<Complex64>,
    /// `(M+1) x N`; row 0 is the direct link (all ones), row `m` holds
    /// `theta_m^(n)` for `n = 0..N`. Entries repeat with period `N`.
    pub theta: ComplexMatrix,
    /// Average per-sample power.
    pub gamma2: f64,
    pub omega: u64,
    pub delay_spread: usize,
}

impl Scheme1Design {
    pub fn num_subsurfaces(&self) -> usize {
        self.psi.rows() - 1
    }

    pub fn num_symbols(&self) -> usize {
        self.psi.cols()
    }

    /// `S F`, the `N0 x L` frequency-domain pilot matrix.
    pub fn pilot_matrix(&self) -> Result<ComplexMatrix> {
        let f = first_columns(&dft_matrix(self.s.len())?, self.delay_spread)?;
        Ok(ComplexMatrix::from_fn(f.rows(), f.cols(), |r, c| self.s[r] * f[(r, c)]))
    }

    /// Optimal design: equipowered pilot and DFT reflection pattern.
    pub fn optimal(config: &SystemConfig, gamma1: f64) -> Result<Self> {
        Ok(Self {
            s: equipower_pilot(config.n0, gamma1)?,
            psi: dft_reflection_pattern_with_symbols(config.m, config.i0)?,
            gamma1,
            delay_spread: config.max_delay_spread(),
        })
    }

    /// Equipowered pilot with random-phase reflections.
    pub fn random_reflection<R: Rng + ?Sized>(
        config: &SystemConfig,
        gamma1: f64,
        rng: &mut R,
    ) -> Result<Self> {
        Ok(Self {
            s: equipower_pilot(config.n0, gamma1)?,
            psi: random_reflection_pattern(config.m, config.i0, rng)?,
            gamma1,
            delay_spread: config.max_delay_spread(),
        })
    }

    /// DFT reflection pattern with a random-phase pilot.
    ///
    /// The random phases are drawn for the time-domain short symbol (constant
    /// modulus `sqrt(gamma1)`), which is then taken to the frequency domain.
    /// A constant-modulus random-phase pilot drawn directly per subcarrier
    /// would still satisfy `S^H S = gamma1 I` and not be a benchmark at all.
    pub fn random_pilot<R: Rng + ?Sized>(
        config: &SystemConfig,
        gamma1: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let time = random_pilot(config.n0, gamma1, rng)?;
        let s = dft_matrix(config.n0)?.mul_vec(&time)?;
        Ok(Self {
            s,
            psi: dft_reflection_pattern_with_symbols(config.m, config.i0)?,
            gamma1,
            delay_spread: config.max_delay_spread(),
        })
    }

    /// Residuals `(||Psi Psi^H - I0 I||_F, ||S^H S - gamma1 I||_F)`.
    pub fn orthogonality_residuals(&self) -> (f64, f64) {
        let psi_gram = self
            .psi
            .matmul(&self.psi.adjoint())
            .expect("square by construction");
        let psi_res = psi_gram.distance_from_scaled_identity(self.num_symbols() as f64);
        let pilot_res = self
            .s
            .iter()
            .map(|s| (s.norm_sqr() - self.gamma1).powi(2))
            .sum::<f64>()
            .sqrt();
        (psi_res, pilot_res)
    }

    /// Whether both closed-form pseudo-inverses apply.
    pub fn is_orthogonal(&self) -> bool {
        let (psi_res, pilot_res) = self.orthogonality_residuals();
        let size = self.psi.rows() as f64;
        psi_res <= 1e-10 * self.num_symbols() as f64 * size
            && pilot_res <= 1e-12 * self.gamma1 * (self.s.len() as f64).sqrt()
    }
}

/// Maximum Frobenius residuals of the two Scheme 2 orthogonality conditions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthogonalityReport {
    /// `||X^H X - gamma2 N I||_F`.
    pub autocorrelation: f64,
    /// `max_{m != m'} ||X^H Theta_m^H Theta_m' X||_F`; zero when `M = 0`.
    pub cross_block: f64,
    /// `gamma2 N`.
    pub scale: f64,
}

impl OrthogonalityReport {
    pub fn passes(&self, rel_tol: f64) -> bool {
        self.autocorrelation <= rel_tol * self.scale && self.cross_block <= rel_tol * self.scale
    }
}

impl Scheme2Design {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn num_subsurfaces(&self) -> usize {
        self.theta.rows() - 1
    }

    /// Reflection of sub-surface `m` at sample `n`, extended periodically.
    pub fn reflection(&self, m: usize, n: i64) -> Complex64 {
        let period = self.x.len() as i64;
        self.theta[(m, n.rem_euclid(period) as usize)]
    }

    /// Zadoff-Chu pilot with the matched per-sample reflection table.
    pub fn optimal(config: &SystemConfig, gamma2: f64) -> Result<Self> {
        let l = config.max_delay_spread();
        Ok(Self {
            x: zadoff_chu_pilot(config.n, config.omega, gamma2)?,
            theta: sampling_reflection_pattern(config.n, config.m, l, config.omega)?,
            gamma2,
            omega: config.omega,
            delay_spread: l,
        })
    }

    /// Zadoff-Chu pilot with i.i.d. random-phase reflections.
    pub fn random_reflection<R: Rng + ?Sized>(
        config: &SystemConfig,
        gamma2: f64,
        rng: &mut R,
    ) -> Result<Self> {
        Ok(Self {
            x: zadoff_chu_pilot(config.n, config.omega, gamma2)?,
            theta: random_reflection_pattern(config.m, config.n, rng)?,
            gamma2,
            omega: config.omega,
            delay_spread: config.max_delay_spread(),
        })
    }

    /// Random-phase pilot with the closed-form reflection table.
    pub fn random_pilot<R: Rng + ?Sized>(
        config: &SystemConfig,
        gamma2: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let l = config.max_delay_spread();
        Ok(Self {
            x: random_pilot(config.n, gamma2, rng)?,
            theta: sampling_reflection_pattern(config.n, config.m, l, config.omega)?,
            gamma2,
            omega: config.omega,
            delay_spread: l,
        })
    }

    pub fn is_orthogonal(&self) -> Result<bool> {
        Ok(verify_scheme2_orthogonality(self, self.delay_spread, self.num_subsurfaces())?
            .passes(1e-9))
    }
}

/// `s_k = sqrt(gamma1)` on all `N0` subcarriers.
pub fn equipower_pilot(n0: usize, gamma1: f64) -> Result<Vec<Complex64>> {
    if n0 == 0 || !(gamma1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "equipower pilot needs N0 >= 1 and positive power, got N0={n0}, gamma1={gamma1}"
        )));
    }
    Ok(vec![Complex64::new(gamma1.sqrt(), 0.0); n0])
}

/// `(M+1) x (M+1)` DFT pattern, `Psi[m][i] = exp(-j 2 pi m i / (M+1))`.
pub fn dft_reflection_pattern(m: usize) -> Result<ComplexMatrix> {
    dft_reflection_pattern_with_symbols(m, m + 1)
}

/// First `M+1` rows of the (unnormalized) `I0`-point DFT, so that
/// `Psi Psi^H = I0 I` for any `I0 >= M+1`.
pub fn dft_reflection_pattern_with_symbols(m: usize, i0: usize) -> Result<ComplexMatrix> {
    if m == 0 || i0 < m + 1 {
        return Err(Error::InvalidDimension(format!(
            "DFT reflection pattern needs M >= 1 and I0 >= M+1, got M={m}, I0={i0}"
        )));
    }
    Ok(ComplexMatrix::from_fn(m + 1, i0, |r, i| {
        cis(-2.0 * PI * ((r * i) % i0) as f64 / i0 as f64)
    }))
}

/// Row 0 all ones, rows `1..=M` i.i.d. uniform-phase unit-modulus entries.
pub fn random_reflection_pattern<R: Rng + ?Sized>(
    m: usize,
    columns: usize,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    if columns < m + 1 {
        return Err(Error::InvalidDimension(format!(
            "random reflection pattern needs at least M+1 = {} columns, got {columns}",
            m + 1
        )));
    }
    Ok(ComplexMatrix::from_fn(m + 1, columns, |r, _| {
        if r == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            random_phase(rng)
        }
    }))
}

fn check_root(n: usize, omega: u64) -> Result<()> {
    if n == 0 || omega == 0 || gcd(omega, n as u64) != 1 {
        return Err(Error::InvalidRoot { omega, len: n });
    }
    Ok(())
}

/// Zadoff-Chu pilot `x_n = sqrt(gamma2) exp(-j pi omega n^2 / N)`.
pub fn zadoff_chu_pilot(n: usize, omega: u64, gamma2: f64) -> Result<Vec<Complex64>> {
    check_root(n, omega)?;
    let amp = gamma2.sqrt();
    let modulus = 2 * n as u128;
    Ok((0..n as u128)
        .map(|k| {
            let e = (omega as u128 * k * k) % modulus;
            cis(-PI * e as f64 / n as f64) * amp
        })
        .collect())
}

/// Per-sample reflection table `theta_m^(n) = exp(j pi omega (2n - mL) mL / N)`,
/// returned as `(M+1) x N` with row 0 all ones.
pub fn sampling_reflection_pattern(n: usize, m: usize, l: usize, omega: u64) -> Result<ComplexMatrix> {
    check_root(n, omega)?;
    let required = l * (m + 1);
    if n < required {
        return Err(Error::InsufficientLength { n, required });
    }
    let modulus = 2 * n as i128;
    Ok(ComplexMatrix::from_fn(m + 1, n, |row, k| {
        let ml = (row * l) as i128;
        let e = (omega as i128 * (2 * k as i128 - ml) * ml).rem_euclid(modulus);
        cis(PI * e as f64 / n as f64)
    }))
}

/// The Scheme 1 DFT pattern squeezed into one full symbol: column `i` of the
/// `(M+1)`-point pattern is held for `N / (M+1)` consecutive samples.
///
/// Combined with a Zadoff-Chu pilot this leaves the Scheme 2 system
/// numerically rank deficient.
pub fn held_dft_reflection_pattern(n: usize, m: usize) -> Result<ComplexMatrix> {
    let psi = dft_reflection_pattern(m)?;
    if n < m + 1 {
        return Err(Error::InsufficientLength { n, required: m + 1 });
    }
    Ok(ComplexMatrix::from_fn(m + 1, n, |row, k| psi[(row, k * (m + 1) / n)]))
}

/// `x_n = sqrt(gamma2) e^{j phi_n}` with i.i.d. uniform phases.
pub fn random_pilot<R: Rng + ?Sized>(n: usize, gamma2: f64, rng: &mut R) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(Error::InvalidParameter("pilot length must be positive".into()));
    }
    let amp = gamma2.sqrt();
    Ok((0..n).map(|_| random_phase(rng) * amp).collect())
}

/// Residuals of `X^H X = gamma2 N I` and `X^H Theta_m^H Theta_m' X = 0`.
pub fn verify_scheme2_orthogonality(
    design: &Scheme2Design,
    l: usize,
    m: usize,
) -> Result<OrthogonalityReport> {
    let scale = design.gamma2 * design.len() as f64;
    let design = Scheme2Design {
        delay_spread: l,
        theta: ComplexMatrix::from_fn(m + 1, design.len(), |r, c| design.theta[(r, c)]),
        ..design.clone()
    };
    let xi = build_xi(&design)?;
    let gram = xi.adjoint().matmul(&xi)?;
    let block = |a: usize, b: usize| {
        ComplexMatrix::from_fn(l, l, |r, c| gram[(a * l + r, b * l + c)])
    };
    let autocorrelation = block(0, 0).distance_from_scaled_identity(scale);
    let mut cross_block: f64 = 0.0;
    for a in 0..=m {
        for b in 0..=m {
            if a != b {
                cross_block = cross_block.max(block(a, b).frobenius_norm());
            }
        }
    }
    Ok(OrthogonalityReport {
        autocorrelation,
        cross_block,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn equipower_values() {
        assert_eq!(equipower_pilot(1, 1.0).unwrap(), vec![c(1.0, 0.0)]);
        assert_eq!(equipower_pilot(8, 4.0).unwrap(), vec![c(2.0, 0.0); 8]);
        assert!(equipower_pilot(0, 1.0).is_err());
    }

    #[test]
    fn dft_pattern_m1() {
        let psi = dft_reflection_pattern(1).unwrap();
        let expected = [[1.0, 1.0], [1.0, -1.0]];
        for r in 0..2 {
            for col in 0..2 {
                assert!((psi[(r, col)] - c(expected[r][col], 0.0)).norm() < 1e-15);
            }
        }
        assert!(dft_reflection_pattern(0).is_err());
    }

    #[test]
    fn zc_n4() {
        let x = zadoff_chu_pilot(4, 1, 1.0).unwrap();
        let e = cis(-PI / 4.0);
        let expected = [c(1.0, 0.0), e, c(-1.0, 0.0), e];
        for (a, b) in x.iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
        assert_eq!(zadoff_chu_pilot(1, 1, 9.0).unwrap(), vec![c(3.0, 0.0)]);
        assert!(matches!(zadoff_chu_pilot(128, 2, 1.0), Err(Error::InvalidRoot { omega: 2, len: 128 })));
    }

    #[test]
    fn reflection_table_small() {
        let t = sampling_reflection_pattern(4, 1, 1, 1).unwrap();
        assert!((t[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((t[(1, 0)] - cis(-PI / 4.0)).norm() < 1e-15);
        assert!((t[(1, 1)] - cis(PI / 4.0)).norm() < 1e-15);
        assert!(matches!(
            sampling_reflection_pattern(127, 15, 8, 1),
            Err(Error::InsufficientLength { n: 127, required: 128 })
        ));
    }

    #[test]
    fn random_designs_are_seeded() {
        let a = random_pilot(16, 2.0, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let b = random_pilot(16, 2.0, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(a, b);
        let p = random_reflection_pattern(3, 4, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let q = random_reflection_pattern(3, 4, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(p, q);
        assert!(p.row(0).iter().all(|z| *z == c(1.0, 0.0)));
        assert!(random_reflection_pattern(3, 3, &mut ChaCha8Rng::seed_from_u64(5)).is_err());
    }

    #[test]
    fn optimal_scheme1_is_orthogonal() {
        let cfg = SystemConfig::default();
        let d = Scheme1Design::optimal(&cfg, 0.3).unwrap();
        assert!(d.is_orthogonal());
        let r = Scheme1Design::random_reflection(&cfg, 0.3, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(!r.is_orthogonal());
        let p = Scheme1Design::random_pilot(&cfg, 0.3, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(!p.is_orthogonal());
        // the time-domain draw keeps the total pilot energy
        let energy: f64 = p.s.iter().map(Complex64::norm_sqr).sum();
        assert!((energy - 0.3 * 8.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_m0_has_no_cross_blocks() {
        let d = Scheme2Design {
            x: zadoff_chu_pilot(16, 1, 1.0).unwrap(),
            theta: ComplexMatrix::from_fn(1, 16, |_, _| c(1.0, 0.0)),
            gamma2: 1.0,
            omega: 1,
            delay_spread: 4,
        };
        let report = verify_scheme2_orthogonality(&d, 4, 0).unwrap();
        assert_eq!(report.cross_block, 0.0);
        assert!(report.autocorrelation < 1e-12);
    }
}
