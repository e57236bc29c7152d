use irs_chanest::channel::{
    cascade, effective_cir, exp_pdp, link_gains, random_phase, sample_link_set,
    sample_rayleigh_link, sample_rician_link, LinkSet,
};
use irs_chanest::experiment::expected_rx_power;
use irs_chanest::{Error, SystemConfig};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DRAWS: usize = 100_000;

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want
}

fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(Complex64::norm_sqr).sum()
}

#[test]
fn rayleigh_energy_and_tap_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let pdp = exp_pdp(8, 2.0).unwrap();
    let gain = 3.5;
    let (mut total, mut tap0, mut tap1) = (0.0, 0.0, 0.0);
    for _ in 0..DRAWS {
        let h = sample_rayleigh_link(&pdp, gain, &mut rng);
        total += energy(&h);
        tap0 += h[0].norm_sqr();
        tap1 += h[1].norm_sqr();
    }
    assert!(rel_err(total / DRAWS as f64, gain) < 0.02);
    assert!(rel_err(tap1 / tap0, (-0.5f64).exp()) < 0.05);
}

#[test]
fn rician_without_los_is_all_nlos() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pdp = exp_pdp(2, 2.0).unwrap();
    let mut total = 0.0;
    for _ in 0..DRAWS {
        let h = sample_rician_link(&pdp, 2.0, 0.0, &mut rng);
        assert_eq!(h[0].norm(), 0.0);
        total += energy(&h);
    }
    assert!(rel_err(total / DRAWS as f64, 2.0) < 0.02);
}

#[test]
fn rician_los_tap_power() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pdp = exp_pdp(3, 2.0).unwrap();
    let (mut first, mut total) = (0.0, 0.0);
    for _ in 0..DRAWS {
        let h = sample_rician_link(&pdp, 1.0, 1.0, &mut rng);
        first += h[0].norm_sqr();
        total += energy(&h);
    }
    assert!(rel_err(first / DRAWS as f64, 0.5) < 0.02);
    assert!(rel_err(total / DRAWS as f64, 1.0) < 0.02);
}

#[test]
fn single_tap_rician_is_pure_los() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for kappa in [0.0, 1.0, 1e4] {
        let h = sample_rician_link(&[1.0], 2.0, kappa, &mut rng);
        assert!((h[0].norm_sqr() - 2.0).abs() < 1e-12);
    }
}

#[test]
fn cascaded_power_with_unit_geometry() {
    let cfg = SystemConfig {
        m: 1,
        m0: 4,
        l1: 2,
        l2: 1,
        ld: 2,
        gamma0: 1.0,
        d1: 1.0,
        d2: 1.0,
        d3: 1.0,
        n: 16,
        n0: 2,
        l_cp: 2,
        i0: 2,
        ..SystemConfig::default()
    };
    cfg.validate().unwrap();
    let l = cfg.max_delay_spread();
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut q = 0.0;
    for _ in 0..DRAWS {
        let r = cascade(&sample_link_set(&cfg, &mut rng).unwrap(), l).unwrap();
        q += r.q.frobenius_norm_sqr();
    }
    assert!(rel_err(q / DRAWS as f64, cfg.mu() as f64) < 0.03);
}

#[test]
fn direct_and_superimposed_power() {
    let cfg = SystemConfig::default();
    let l = cfg.max_delay_spread();
    let (direct, _, _) = link_gains(&cfg).unwrap();
    assert!(rel_err(direct, 1e-3 * 51f64.powf(-3.6)) < 1e-12);
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let (mut d, mut h) = (0.0, 0.0);
    for _ in 0..DRAWS {
        let r = cascade(&sample_link_set(&cfg, &mut rng).unwrap(), l).unwrap();
        d += energy(&r.d);
        let theta: Vec<Complex64> = (0..cfg.m).map(|_| random_phase(&mut rng)).collect();
        h += energy(&effective_cir(&r, &theta).unwrap());
    }
    assert!(rel_err(d / DRAWS as f64, direct) < 0.02);
    let oracle = 135.0 * 1e-6 * 1.5f64.powf(-2.2) * 50f64.powf(-2.4) + direct;
    assert!(rel_err(oracle, expected_rx_power(&cfg)) < 1e-12);
    assert!(rel_err(h / DRAWS as f64, oracle) < 0.03);
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn single_tap_user_link_scales_bs_link() {
    let g = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
    let u = c(0.3, -0.7);
    let links = LinkSet {
        d: vec![c(1.0, 0.0)],
        g: vec![g.clone()],
        u: vec![vec![u]],
    };
    let r = cascade(&links, 5).unwrap();
    for k in 0..3 {
        assert!((r.q[(k, 0)] - g[k] * u).norm() < 1e-15);
    }
    assert_eq!(r.q[(3, 0)], c(0.0, 0.0));
    assert_eq!(r.q[(4, 0)], c(0.0, 0.0));
    assert_eq!(r.d, vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
}

#[test]
fn cascade_zero_pads_and_rejects_short_l() {
    let cfg = SystemConfig {
        l1: 3,
        l2: 2,
        ..SystemConfig::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let links = sample_link_set(&cfg, &mut rng).unwrap();
    let r = cascade(&links, 8).unwrap();
    for m in 0..cfg.m {
        for k in 4..8 {
            assert_eq!(r.q[(k, m)], c(0.0, 0.0));
        }
        assert!(r.q[(3, m)].norm() > 0.0);
    }
    assert!(matches!(cascade(&links, 3), Err(Error::InvalidDimension(_))));
}

#[test]
fn effective_cir_is_direct_plus_weighted_columns() {
    let cfg = SystemConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let r = cascade(&sample_link_set(&cfg, &mut rng).unwrap(), 8).unwrap();
    let theta: Vec<Complex64> = (0..cfg.m).map(|_| random_phase(&mut rng)).collect();
    let h = effective_cir(&r, &theta).unwrap();
    for k in 0..8 {
        let mut want = r.d[k];
        for m in 0..cfg.m {
            want += theta[m] * r.q[(k, m)];
        }
        assert!((h[k] - want).norm() < 1e-20);
    }
    let mut bad = theta.clone();
    bad[3] *= 1.1;
    assert!(matches!(
        effective_cir(&r, &bad),
        Err(Error::InvalidReflection { index: 3, .. })
    ));
}

proptest! {
    #[test]
    fn pdp_is_normalized_and_decreasing(taps in 1usize..20, decay in 0.1..10.0f64) {
        let p = exp_pdp(taps, decay).unwrap();
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for w in p.windows(2) {
            prop_assert!(w[1] < w[0]);
            prop_assert!((w[1] / w[0] - (-1.0 / decay).exp()).abs() < 1e-12);
        }
    }
}
