#![allow(dead_code)]

use irs_chanest::channel::{cascade, sample_link_set, ChannelRealization, LinkSet};
use irs_chanest::SystemConfig;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn draw(cfg: &SystemConfig, rng: &mut ChaCha8Rng) -> (LinkSet, ChannelRealization) {
    let links = sample_link_set(cfg, rng).unwrap();
    let realization = cascade(&links, cfg.max_delay_spread()).unwrap();
    (links, realization)
}

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

pub fn vec_dist_sqr(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum()
}

pub fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}
