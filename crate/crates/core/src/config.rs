//! System dimensions and physical parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// All dimensions and link parameters of one IRS-assisted OFDM setup.
///
/// Field names in the serialized form follow the usual notation (`N`,
/// `L_cp`, `M0`, ...). Powers, gains and the Rician factor are linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemConfig {
    /// Subcarriers per full OFDM symbol.
    #[serde(rename = "N")]
    pub n: usize,
    /// Subcarriers per short OFDM symbol.
    #[serde(rename = "N0")]
    pub n0: usize,
    #[serde(rename = "L_cp")]
    pub l_cp: usize,
    /// Delay spread of the direct link, in samples.
    #[serde(rename = "Ld")]
    pub ld: usize,
    /// Delay spread of the BS to IRS link.
    #[serde(rename = "L1")]
    pub l1: usize,
    /// Delay spread of the IRS to user link.
    #[serde(rename = "L2")]
    pub l2: usize,
    /// Number of sub-surfaces.
    #[serde(rename = "M")]
    pub m: usize,
    /// Number of reflecting elements.
    #[serde(rename = "M0")]
    pub m0: usize,
    /// Zadoff-Chu root.
    pub omega: u64,
    /// Training energy budget.
    #[serde(rename = "P")]
    pub power: f64,
    pub sigma2: f64,
    /// IRS to user distance (m).
    #[serde(rename = "D1")]
    pub d1: f64,
    /// BS to IRS distance (m).
    #[serde(rename = "D2")]
    pub d2: f64,
    /// BS to user distance (m).
    #[serde(rename = "D3")]
    pub d3: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub alpha3: f64,
    /// Path gain at 1 m.
    pub gamma0: f64,
    /// Rician factor of the IRS to user link.
    pub kappa: f64,
    /// Number of short OFDM training symbols.
    #[serde(rename = "I0")]
    pub i0: usize,
    /// Decay constant (in taps) of the exponential power delay profile.
    pub decay: f64,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            n: 128,
            n0: 8,
            l_cp: 8,
            ld: 8,
            l1: 8,
            l2: 1,
            m: 15,
            m0: 135,
            omega: 1,
            power: 1.0,
            sigma2: 1e-11,
            d1: 1.5,
            d2: 50.0,
            d3: 51.0,
            alpha1: 2.2,
            alpha2: 2.4,
            alpha3: 3.6,
            gamma0: 1e-3,
            kappa: 10.0,
            i0: 16,
            decay: 2.0,
        }
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.to_string(),
        message: message.into(),
    }
}

impl SystemConfig {
    /// Overall delay spread `L = max(Ld, L1 + L2 - 1)`.
    pub fn max_delay_spread(&self) -> usize {
        self.ld.max(self.l1 + self.l2 - 1)
    }

    /// Elements per sub-surface.
    pub fn mu(&self) -> usize {
        self.m0 / self.m
    }

    /// Number of unknown channel coefficients, `L (M + 1)`.
    pub fn num_coefficients(&self) -> usize {
        self.max_delay_spread() * (self.m + 1)
    }

    pub fn validate(&self) -> Result<()> {
        let positive_ints = [
            ("N", self.n),
            ("N0", self.n0),
            ("L_cp", self.l_cp),
            ("Ld", self.ld),
            ("L1", self.l1),
            ("L2", self.l2),
            ("M", self.m),
            ("M0", self.m0),
            ("I0", self.i0),
        ];
        for (field, value) in positive_ints {
            if value == 0 {
                return Err(invalid(field, "must be positive"));
            }
        }
        let positive_reals = [
            ("P", self.power),
            ("sigma2", self.sigma2),
            ("D1", self.d1),
            ("D2", self.d2),
            ("D3", self.d3),
            ("alpha1", self.alpha1),
            ("alpha2", self.alpha2),
            ("alpha3", self.alpha3),
            ("gamma0", self.gamma0),
            ("decay", self.decay),
        ];
        for (field, value) in positive_reals {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(field, format!("must be finite and positive, got {value}")));
            }
        }
        if !(self.kappa.is_finite() && self.kappa >= 0.0) {
            return Err(invalid("kappa", "must be finite and non-negative"));
        }
        if !self.m0.is_multiple_of(self.m) {
            return Err(invalid(
                "M0",
                format!("{} elements cannot be split evenly into {} sub-surfaces", self.m0, self.m),
            ));
        }
        let l = self.max_delay_spread();
        if self.l_cp < l {
            return Err(invalid("L_cp", format!("CP length {} is shorter than L = {l}", self.l_cp)));
        }
        if self.n0 < l {
            return Err(invalid("N0", format!("short symbol length {} is shorter than L = {l}", self.n0)));
        }
        if self.i0 < self.m + 1 {
            return Err(invalid("I0", format!("need at least M+1 = {} short symbols", self.m + 1)));
        }
        if self.n < l * (self.m + 1) {
            return Err(invalid(
                "N",
                format!("single-symbol training needs N >= L(M+1) = {}", l * (self.m + 1)),
            ));
        }
        if self.omega == 0 || gcd(self.omega, self.n as u64) != 1 {
            return Err(invalid(
                "omega",
                format!("root {} is not coprime to N = {}", self.omega, self.n),
            ));
        }
        Ok(())
    }

    /// Scheme 1 training time in sampling periods, `I0 (N0 + L_cp)`.
    pub fn training_duration_scheme1(&self) -> usize {
        self.i0 * (self.n0 + self.l_cp)
    }

    /// Scheme 2 training time in sampling periods, `N + L_cp`.
    pub fn training_duration_scheme2(&self) -> usize {
        self.n + self.l_cp
    }

    /// Conventional full-symbol training time `(M+1)(N + L_cp)`.
    pub fn training_duration_conventional(&self) -> usize {
        (self.m + 1) * (self.n + self.l_cp)
    }

    /// Per-subcarrier pilot power of Scheme 1 under the budget `P`.
    pub fn gamma1(&self) -> f64 {
        self.power / self.training_duration_scheme1() as f64
    }

    /// Per-sample pilot power of Scheme 2 under the budget `P`.
    pub fn gamma2(&self) -> f64 {
        self.power / self.training_duration_scheme2() as f64
    }

    /// Multiplication counts of the two closed-form estimators.
    pub fn complexity(&self) -> (usize, usize) {
        let l = self.max_delay_spread();
        let s1 = self.n0 * l * (self.i0 + 1) + l * self.i0 * (self.m + 1);
        let s2 = self.n * l * (self.m + 1);
        (s1, s2)
    }
}
