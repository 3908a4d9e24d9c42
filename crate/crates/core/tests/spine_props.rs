use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sciq_core::spine::*;

// F(H) = (2/n') (H - H0 sqrt((B/H0^2 - 1) / (B/H^2 - 1))) Ks, B = 4 l1^2 n'^2
fn oracle_force(g: &ScissorGeometry, ks: f64, h0: f64, h: f64) -> f64 {
    let np = 1.0 + (g.n as f64 - 1.0) * g.l2 / g.l1;
    let b = 4.0 * g.l1 * g.l1 * np * np;
    2.0 / np * (h - h0 * ((b / (h0 * h0) - 1.0) / (b / (h * h) - 1.0)).sqrt()) * ks
}

fn oracle_slope(g: &ScissorGeometry, ks: f64, h0: f64, h: f64) -> f64 {
    let np = 1.0 + (g.n as f64 - 1.0) * g.l2 / g.l1;
    let b = 4.0 * g.l1 * g.l1 * np * np;
    let num = b / (h0 * h0) - 1.0;
    let den = b / (h * h) - 1.0;
    2.0 / np * ks * (1.0 - h0 * num.sqrt() * b / (h.powi(3) * den.powf(1.5)))
}

fn random_config(rng: &mut ChaCha8Rng) -> SpineConfig {
    let n = rng.gen_range(1..=5);
    let l1 = rng.gen_range(0.02..0.05);
    let l2 = rng.gen_range(l1..3.0 * l1);
    let reach = 2.0 * l1 * (1.0 + (n as f64 - 1.0) * l2 / l1);
    let h_min = rng.gen_range(0.1..0.3) * reach;
    let h_max = rng.gen_range(0.5..0.7) * reach;
    let geometry = ScissorGeometry::new(n, l1, l2, h_min, h_max, 0.04).unwrap();
    let springs = vec![SpringSpec::new(rng.gen_range(50.0..800.0), 0.02, rng.gen_range(1..=8)).unwrap()];
    SpineConfig::new("random", geometry, springs, rng.gen_range(0.75..0.97) * reach).unwrap()
}

#[test]
fn inverse_kinematics_in_the_well_conditioned_range() {
    let g = ScissorGeometry::PROTOTYPE;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let d: f64 = rng.gen_range(1e-3..2.0 * g.l1);
        let back = g.span_from_extension(g.extension_from_span(d).unwrap()).unwrap();
        assert!(((back - d) / d).abs() <= 1e-12, "d={d} back={back}");

        let h: f64 = rng.gen_range(0.02..g.max_extension());
        let back = g.extension_from_span(g.span_from_extension(h).unwrap()).unwrap();
        assert!(((back - h) / h).abs() <= 1e-12, "h={h} back={back}");
    }
}

#[test]
fn extension_falls_as_span_opens() {
    let g = ScissorGeometry::PROTOTYPE;
    let hs: Vec<f64> = (0..600).map(|i| g.extension_from_span(i as f64 * 1e-4).unwrap()).collect();
    assert_eq!(hs[0], g.max_extension());
    assert!(hs.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn force_matches_closed_form_oracle() {
    for cfg in [SpineConfig::weak(), SpineConfig::medium(), SpineConfig::strong()] {
        let g = cfg.geometry;
        for i in 1..=1000 {
            let h = cfg.h0 * i as f64 / 1000.0;
            let (lin, nonlin) = cfg.force_decomposition(h).unwrap();
            let want = oracle_force(&g, cfg.ks(), cfg.h0, h);
            assert!((cfg.spine_force(h).unwrap() - want).abs() <= 1e-12 * (lin.abs() + nonlin.abs()), "h={h}");
        }
    }
}

#[test]
fn slope_matches_analytic_derivative() {
    let cfg = SpineConfig::strong();
    let g = cfg.geometry;
    let step = 1e-6;
    for i in 1..200 {
        let h = 0.01 + i as f64 * 0.001;
        let fd = (cfg.spine_force(h + step).unwrap() - cfg.spine_force(h - step).unwrap()) / (2.0 * step);
        let exact = oracle_slope(&g, cfg.ks(), cfg.h0, h);
        assert!((fd - exact).abs() <= 1e-5 * exact.abs().max(1.0), "h={h}: {fd} vs {exact}");
    }
}

#[test]
fn peak_is_where_the_slope_vanishes() {
    let cfg = SpineConfig::strong();
    let (h_peak, f_peak) = cfg.peak_extension().unwrap();
    let slope = |h| oracle_slope(&cfg.geometry, cfg.ks(), cfg.h0, h);
    assert!(slope(h_peak - 1e-4) > 0.0 && slope(h_peak + 1e-4) < 0.0);
    assert!((f_peak - oracle_force(&cfg.geometry, cfg.ks(), cfg.h0, h_peak)).abs() < 1e-9);
}

#[test]
fn peak_location_ignores_spring_stiffness() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let cfg = random_config(&mut rng);
        let (h, f) = cfg.peak_extension().unwrap();
        let c = rng.gen_range(0.1..10.0);
        let (hc, fc) = cfg.scaled(c).peak_extension().unwrap();
        assert!((hc - h).abs() < 1e-7, "{h} vs {hc}");
        assert!((fc - c * f).abs() <= 1e-9 * fc.abs());
    }
}

#[test]
fn stored_energy_matches_trapezoid_oracle() {
    let cfg = SpineConfig::strong();
    let (a, b) = (0.08, 0.2);
    let n = 200_000;
    let dh = (b - a) / n as f64;
    let trap: f64 = (0..n)
        .map(|i| {
            let h = a + i as f64 * dh;
            0.5 * (cfg.spine_force(h).unwrap() + cfg.spine_force(h + dh).unwrap()) * dh
        })
        .sum();
    let e = cfg.stored_elastic_energy(a, b).unwrap();
    assert!((e - trap).abs() < 1e-7, "{e} vs {trap}");
    assert!((cfg.stored_elastic_energy(b, a).unwrap() + e).abs() < 1e-12);
}

#[test]
fn force_outside_domain_is_an_error() {
    let cfg = SpineConfig::strong();
    for h in [0.0, -0.01, cfg.h0 + 1e-6, f64::NAN] {
        assert!(matches!(cfg.spine_force(h), Err(ModelError::Domain { .. })), "h={h}");
    }
    // inside the guard band the boundary value is returned
    assert_eq!(cfg.spine_force(cfg.h0 + 5e-10).unwrap(), 0.0);
}
