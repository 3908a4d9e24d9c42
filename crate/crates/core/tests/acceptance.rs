//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::net::{Ipv4Addr, SocketAddr};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sciq_core::bus::*;
use sciq_core::harness::*;
use sciq_core::lock::*;
use sciq_core::sim::*;
use sciq_core::spine::*;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

fn configs() -> [SpineConfig; 3] {
    [SpineConfig::weak(), SpineConfig::medium(), SpineConfig::strong()]
}

fn geometry() -> Check {
    let g = ScissorGeometry::new(3, 0.03, 0.06, 0.08, 0.2, 0.04).map_err(|e| e.to_string())?;
    ensure!(g.transformed_segment_count() == 5.0, "n' = {}", g.transformed_segment_count());
    let h = g.extension_from_span(0.048).map_err(|e| e.to_string())?;
    ensure!((h - 0.18).abs() <= 1e-9, "extension_from_span(0.048) = {h}");

    let mut rng = ChaCha8Rng::seed_from_u64(605);
    let mut over = Vec::new();
    for _ in 0..1000 {
        let d: f64 = rng.gen_range(f64::MIN_POSITIVE..2.0 * g.l1);
        let back = g.span_from_extension(g.extension_from_span(d).unwrap()).unwrap();
        let rel = ((back - d) / d).abs();
        if rel > 1e-12 {
            over.push((d, rel));
        }
    }
    if let Some(&(d_max, _)) = over.iter().max_by(|a, b| a.0.total_cmp(&b.0)) {
        let worst = over.iter().map(|o| o.1).fold(0.0, f64::max);
        return Err(format!(
            "round trip: {}/1000 draws exceed 1e-12 relative (worst {worst:.1e}); all at d <= {d_max:.1e} m, \
             where one ulp of H spans more than 1e-12 of d",
            over.len()
        ));
    }
    Ok("n' = 5, H(0.048) = 0.18, 1000 round trips".into())
}

// F(H) = (2/n') (H - H0 sqrt((B/H0^2 - 1) / (B/H^2 - 1))) Ks
fn oracle_force(cfg: &SpineConfig, h: f64) -> f64 {
    let g = &cfg.geometry;
    let np = 1.0 + (g.n as f64 - 1.0) * g.l2 / g.l1;
    let b = 4.0 * g.l1 * g.l1 * np * np;
    2.0 / np * (h - cfg.h0 * ((b / (cfg.h0 * cfg.h0) - 1.0) / (b / (h * h) - 1.0)).sqrt()) * cfg.ks()
}

fn force_law() -> Check {
    for cfg in configs() {
        let name = &cfg.name;
        let np = cfg.geometry.transformed_segment_count();
        ensure!(cfg.spine_force(cfg.h0) == Ok(0.0), "{name}: F(H0) = {:?}", cfg.spine_force(cfg.h0));
        for i in 1..=1000 {
            let h = cfg.h0 * i as f64 / 1000.0;
            let f = cfg.spine_force(h).unwrap();
            let (lin, nonlin) = cfg.force_decomposition(h).unwrap();
            let scale = lin.abs() + nonlin.abs();
            ensure!((lin + nonlin - f).abs() <= 1e-12 * f.abs(), "{name}: lin + nonlin != F at {h}");
            ensure!((f - oracle_force(&cfg, h)).abs() <= 1e-12 * scale, "{name}: F differs from oracle at {h}");
        }
        let limit = -(2.0 / np) * cfg.h0 * cfg.ks();
        let at_h0 = cfg.force_decomposition(cfg.h0).unwrap().1;
        ensure!((at_h0 - limit).abs() <= 1e-9, "{name}: F_nonlin(H0) = {at_h0}, want {limit}");
        let tail: Vec<f64> = (3..=12).map(|k| cfg.force_decomposition(10f64.powi(-k)).unwrap().1.abs()).collect();
        ensure!(tail.windows(2).all(|w| w[1] < w[0]), "{name}: F_nonlin not shrinking toward H = 0");
        ensure!(tail[9] <= 1e-8, "{name}: F_nonlin(1e-12) = {}", tail[9]);
    }
    Ok("F(H0) = 0, decomposition and limits hold on 3 configs".into())
}

fn brute_force_peak(cfg: &SpineConfig) -> f64 {
    let upper = cfg.force_domain_upper();
    let n = (upper / 1e-5) as usize;
    (1..n)
        .map(|i| i as f64 * 1e-5)
        .max_by(|&a, &b| cfg.spine_force(a).unwrap().total_cmp(&cfg.spine_force(b).unwrap()))
        .unwrap()
}

fn degressive_and_peak() -> Check {
    for cfg in configs() {
        let name = &cfg.name;
        let (h_peak, _) = cfg.peak_extension().map_err(|e| e.to_string())?;
        let mut h = cfg.geometry.h_min;
        let mut prev = cfg.spine_force(h).unwrap();
        while h + 1e-5 < h_peak {
            h += 1e-5;
            let f = cfg.spine_force(h).unwrap();
            ensure!(f > prev, "{name}: force not rising at {h}");
            prev = f;
        }
        let oracle = brute_force_peak(&cfg);
        ensure!((h_peak - oracle).abs() <= 1e-4, "{name}: H_peak {h_peak} vs grid {oracle}");
    }

    let mut rng = ChaCha8Rng::seed_from_u64(607);
    for i in 0..50 {
        let n = rng.gen_range(1..=5);
        let l1 = rng.gen_range(0.02..0.05);
        let l2 = rng.gen_range(l1..3.0 * l1);
        let reach = 2.0 * l1 * (1.0 + (n as f64 - 1.0) * l2 / l1);
        let geometry = ScissorGeometry::new(n, l1, l2, 0.2 * reach, 0.6 * reach, 0.04).unwrap();
        let springs = vec![SpringSpec::new(rng.gen_range(50.0..800.0), 0.02, rng.gen_range(1..=8)).unwrap()];
        let cfg = SpineConfig::new("random", geometry, springs, rng.gen_range(0.75..0.97) * reach).unwrap();
        let (h, _) = cfg.peak_extension().unwrap();
        let c = rng.gen_range(0.1..10.0);
        let (hc, _) = cfg.scaled(c).peak_extension().unwrap();
        ensure!((h - hc).abs() <= 1e-7, "config {i}: H_peak {h} moved to {hc} under Ks x {c}");
    }

    let strong = SpineConfig::strong();
    let f_max = (0..=12_000).map(|i| strong.spine_force(0.08 + i as f64 * 1e-5).unwrap()).fold(f64::MIN, f64::max);
    ensure!(f_max <= 80.0, "strong max force {f_max} N");
    let (hp, fp) = strong.peak_extension().unwrap();
    Ok(format!("strong peak {fp:.2} N at {hp:.4} m, 50 scaled configs invariant"))
}

fn alarm_ticks(mu: f64, xs: &[f64]) -> Vec<usize> {
    let nm = |x: f64| (x * 1e9).round() as i64;
    let mut g = 0i64;
    let mut out = Vec::new();
    for (i, &x) in xs.iter().enumerate() {
        g = (g + nm(mu) - nm(x) - 2_000_000).max(0);
        if g > 6_000_000 {
            out.push(i + 1);
            g = 0;
        }
    }
    out
}

fn lock_fsm() -> Check {
    let p = ControllerParams::default();
    let want = [
        (LockScenario::A, LockState::Locked { h_lock: 0.12 }, 0, 0),
        (LockScenario::B, LockState::Unlocked, 0, 0),
        (LockScenario::C, LockState::Locked { h_lock: 0.08 }, 1, 0),
        (LockScenario::D, LockState::Unlocked, 0, 1),
    ];
    for (scenario, state, engage, retract) in want {
        let run = locktest(scenario, &p).map_err(|e| e.to_string())?;
        ensure!(run.final_state == state, "{scenario:?}: ended {:?}", run.final_state);
        ensure!(
            (run.engage_count, run.retract_count) == (engage, retract),
            "{scenario:?}: {} engage, {} retract",
            run.engage_count,
            run.retract_count
        );
    }

    let mut rng = ChaCha8Rng::seed_from_u64(608);
    let (mut both, mut unlock_only, mut press_only) = (0, 0, 0);
    for trial in 0..100 {
        let unlock_at = rng.gen_bool(0.8).then(|| rng.gen_range(0..100usize));
        let press = rng.gen_bool(0.8).then(|| (rng.gen_range(0..100usize), rng.gen_range(1..30), rng.gen_range(0.003..0.01)));
        let hs: Vec<f64> = (0..120)
            .map(|t| match press {
                Some((s, len, depth)) if (s..s + len).contains(&t) => 0.08 - depth,
                _ => 0.08,
            })
            .collect();
        let expected = unlock_at.and_then(|u| alarm_ticks(0.08, &hs[u + 1..]).first().map(|k| u + k));
        let mut c = SpineController::new(p.clone(), LockState::Locked { h_lock: 0.08 }, 0.08).unwrap();
        let mut retracts = Vec::new();
        for (t, &h) in hs.iter().enumerate() {
            let cmd = (unlock_at == Some(t)).then_some(LockCommand::Unlock);
            let out = c.tick_with_length(h, cmd).unwrap();
            if out.action == PinAction::RetractPin {
                ensure!(out.snapshot.alarm, "ordering {trial}: retract without alarm at {t}");
                retracts.push(t);
            }
        }
        ensure!(
            retracts == expected.into_iter().collect::<Vec<_>>(),
            "ordering {trial}: retracts {retracts:?}, expected {expected:?} (unlock {unlock_at:?}, press {press:?})"
        );
        match (unlock_at, press, expected) {
            (Some(_), Some(_), Some(_)) => both += 1,
            (Some(_), None, _) => unlock_only += 1,
            (None, Some(_), _) => press_only += 1,
            _ => {}
        }
    }
    ensure!(both > 0 && unlock_only > 0 && press_only > 0, "orderings not mixed: {both}/{unlock_only}/{press_only}");
    Ok(format!("scenarios a-d end as expected; 100 orderings ({both} retract, {unlock_only} unlock-only, {press_only} press-only)"))
}

fn cusum() -> Check {
    let kappa = CusumDetector::DEFAULT_KAPPA;
    let noise = Normal::new(0.0, kappa / 3.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(609);
    let mut det = CusumDetector::with_defaults(0.12);
    let n_alarms = (0..10_000).filter(|_| det.update(0.12 + noise.sample(&mut rng))).count();
    ensure!(n_alarms == 0, "{n_alarms} alarms on quiet signal");

    let mut det = CusumDetector::with_defaults(0.12);
    let first = (1..=10).find(|_| det.update(0.115));
    ensure!(first == Some(3), "step alarmed on sample {first:?}");
    ensure!(alarm_ticks(0.12, &[0.115; 3]) == vec![3], "reference recursion disagrees");
    Ok("10,000 quiet samples, 0 alarms; -0.005 m step alarms on sample 3".into())
}

fn random_message(rng: &mut ChaCha8Rng) -> Message {
    if rng.gen_bool(0.5) {
        Message::State(SpineStateMsg {
            h_est_dmm: rng.gen(),
            lock_state: WireLockState::from_code(rng.gen_range(0..4)).unwrap(),
            health: SensorHealth::from_code(rng.gen_range(0..4)).unwrap(),
            alarm: rng.gen(),
        })
    } else {
        Message::Cmd(SpineCmdMsg { cmd: LockCommand::from_code(rng.gen_range(0..4)).unwrap() })
    }
}

fn crc32_bitwise(bytes: &[u8]) -> u32 {
    let mut crc = 0xFFFF_FFFFu32;
    for &b in bytes {
        crc ^= b as u32;
        for _ in 0..8 {
            crc = if crc & 1 != 0 { (crc >> 1) ^ 0xEDB8_8320 } else { crc >> 1 };
        }
    }
    !crc
}

fn codec_transport() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(610);
    for _ in 0..10_000 {
        let msg = random_message(&mut rng);
        let (seq, t_us) = (rng.gen(), rng.gen());
        let bytes = encode_frame(&msg, seq, t_us);
        ensure!(decode_frame(&bytes) == Ok(Frame { seq, t_us, msg }), "round trip failed for {msg:?}");
    }

    let golden = encode_frame(&Message::Cmd(SpineCmdMsg { cmd: LockCommand::Lock }), 1, 0);
    let mut want = b"SPQ1\x01\x02\x01\x00\x00\x00\x00\x00\x00\x00\x00\x00\x00\x00\x04\x00\x02\x00\x00\x00".to_vec();
    want.extend_from_slice(&[0xdb, 0xc1, 0xae, 0x5e]);
    ensure!(golden == want, "command fixture mismatch");
    ensure!(crc32_bitwise(&want[..24]) == 0x5eae_c1db, "fixture crc disagrees with bitwise oracle");
    let state = Message::State(SpineStateMsg {
        h_est_dmm: 1234,
        lock_state: WireLockState::Locked,
        health: SensorHealth::Both,
        alarm: false,
    });
    let hex = "5350513101012a00000040420f00000000000800d2040100000000009453451c";
    let got: String = encode_frame(&state, 42, 1_000_000).iter().map(|b| format!("{b:02x}")).collect();
    ensure!(got == hex, "state fixture mismatch: {got}");

    let fuzz = std::panic::catch_unwind(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(611);
        let mut accepted = 0;
        for _ in 0..100_000 {
            let n = rng.gen_range(0..48);
            let mut b: Vec<u8> = (0..n).map(|_| rng.gen()).collect();
            if rng.gen_bool(0.5) && b.len() >= 5 {
                b[..5].copy_from_slice(b"SPQ1\x01");
            }
            accepted += decode_frame(&b).is_ok() as u32;
        }
        accepted
    });
    ensure!(fuzz.is_ok(), "decoder panicked on fuzzed input");

    let mut sub = Subscriber::bind((Ipv4Addr::LOCALHOST, 0).into()).map_err(|e| e.to_string())?;
    let target: SocketAddr = sub.local_addr().map_err(|e| e.to_string())?;
    let sent = 1000u32;
    let sender = std::thread::spawn(move || {
        let mut publisher = Publisher::new(target, 1).unwrap();
        let start = Instant::now();
        for i in 0..sent {
            if let Some(w) = (start + Duration::from_millis(10) * i).checked_duration_since(Instant::now()) {
                std::thread::sleep(w);
            }
            publisher.publish(&random_message(&mut ChaCha8Rng::seed_from_u64(i as u64)), i as u64 * 10_000).unwrap();
        }
    });
    let mut seqs = Vec::new();
    while let Some(r) = sub.recv_timeout(Duration::from_millis(500)).map_err(|e| e.to_string())? {
        seqs.push(r.frame.seq);
    }
    sender.join().map_err(|_| "sender panicked".to_string())?;
    let ratio = seqs.len() as f64 / sent as f64;
    ensure!(ratio >= 0.99, "delivered {:.1}%", 100.0 * ratio);
    ensure!(seqs.windows(2).all(|w| w[1] > w[0]), "sequence numbers not monotone");
    Ok(format!("10k round trips, fixtures, 100k fuzz inputs, loopback {:.1}% over 10 s", 100.0 * ratio))
}

fn leg_jacobian_error() -> f64 {
    let p = RobotParams::default();
    let h = 1e-7;
    let mut worst: f64 = 0.0;
    for &(a, b) in &[(0.0, 0.5), (0.4, 1.3), (-0.7, 0.2), (1.0, 2.5), (-0.3, 1.9)] {
        let (_, j) = leg_kinematics(a, b, &p);
        let da = (leg_kinematics(a + h, b, &p).0 - leg_kinematics(a - h, b, &p).0) / (2.0 * h);
        let db = (leg_kinematics(a, b + h, &p).0 - leg_kinematics(a, b - h, &p).0) / (2.0 * h);
        for r in 0..2 {
            worst = worst.max((da[r] - j[(r, 0)]).abs()).max((db[r] - j[(r, 1)]).abs());
        }
    }
    worst
}

fn flight_state(s: f64) -> RobotState {
    let mut q = [0.0; NDOF];
    q[Z] = 1.5;
    q[S] = s;
    q[TH_HF] = 0.2;
    q[TK_HF] = 0.8;
    q[TH_HR] = -0.1;
    q[TK_HR] = 0.6;
    let mut qd = [0.0; NDOF];
    qd[X] = 0.5;
    qd[Z] = 2.0;
    qd[PHI] = 0.8;
    qd[TH_HF] = 1.0;
    qd[TK_HR] = -1.5;
    RobotState { q, qd, t: 0.0 }
}

fn drift(robot: &Robot, mut state: RobotState, joint: SpineJoint) -> Result<f64, String> {
    let e0 = robot.mechanical_energy(&state).map_err(|e| e.to_string())?.total;
    let mut worst: f64 = 0.0;
    for _ in 0..5000 {
        state = dynamics_step(robot, &state, [0.0; 4], joint, 1e-4).map_err(|e| e.to_string())?;
        let e = robot.mechanical_energy(&state).map_err(|e| e.to_string())?.total;
        worst = worst.max(((e - e0) / e0).abs());
    }
    Ok(worst)
}

fn simulator_physics() -> Check {
    let rigid = Robot::new(RobotParams::default(), SpineModule::Rigid, ContactModel::default()).map_err(|e| e.to_string())?;
    let spine = SpineModule::Compliant { config: SpineConfig::strong(), damping: 0.0 };
    let compliant = Robot::new(RobotParams::default(), spine, ContactModel::default()).map_err(|e| e.to_string())?;
    let cases = [
        ("rigid", &rigid, flight_state(rigid.module.rigid_extension(&rigid.params)), SpineJoint::Rigid),
        ("locked", &compliant, flight_state(0.15), SpineJoint::Locked),
        ("compliant", &compliant, flight_state(0.2), SpineJoint::Compliant),
    ];
    let mut worst_drift: f64 = 0.0;
    for (name, robot, state, joint) in cases {
        let d = drift(robot, state, joint)?;
        ensure!(d < 1e-3, "{name}: free-flight energy drift {d:.2e}");
        worst_drift = worst_drift.max(d);
    }

    let mut steps = 0usize;
    for seed in 0..10 {
        for scenario in [Scenario::Nominal, Scenario::TiltedLanding] {
            let cfg = TrialConfig { mode: SpineMode::Compliant, scenario, seed, ..Default::default() };
            let out = run_jump_trial(&cfg).map_err(|e| e.to_string())?;
            let mu = cfg.contact.mu;
            for r in &out.log.rows {
                for (ft, fnn) in [(r.front_ft, r.front_fn), (r.rear_ft, r.rear_fn)] {
                    ensure!(fnn >= 0.0 && ft.abs() <= mu * fnn * (1.0 + 1e-9) + 1e-12, "cone violated at t={} seed {seed}", r.t);
                }
            }
            steps += out.log.rows.len();
        }
    }

    let cfg = TrialConfig { mode: SpineMode::Locked, scenario: Scenario::TiltedLanding, ..Default::default() };
    let out = run_jump_trial(&cfg).map_err(|e| e.to_string())?;
    let s0 = out.log.rows[0].q[S];
    ensure!(out.log.rows.iter().all(|r| r.q[S] == s0 && r.qd[S] == 0.0), "locked spine coordinate moved");

    let jac = leg_jacobian_error();
    ensure!(jac <= 1e-5, "leg Jacobian off by {jac:.1e}");
    Ok(format!("drift {worst_drift:.1e}, cone over {steps} steps, locked s frozen, Jacobian err {jac:.1e}"))
}

fn jump_behaviour() -> Check {
    let base = TrialConfig::default();
    let modes = [SpineMode::Rigid, SpineMode::Compliant];
    let paired = |scenario| -> Result<Vec<(JumpMetrics, JumpMetrics)>, String> {
        let exp = jump_experiment(&base, &modes, scenario, 20, 2024, true).map_err(|e| e.to_string())?;
        let metrics = |m| -> Result<Vec<JumpMetrics>, String> {
            exp.records_for(m)
                .map(|r| r.metrics.ok_or(format!("{} trial {} faulted: {:?}", m.label(), r.trial, r.fault)))
                .collect()
        };
        Ok(metrics(SpineMode::Rigid)?.into_iter().zip(metrics(SpineMode::Compliant)?).collect())
    };

    let nominal = paired(Scenario::Nominal)?;
    let mean = |f: &dyn Fn(&(JumpMetrics, JumpMetrics)) -> f64| nominal.iter().map(f).sum::<f64>() / nominal.len() as f64;
    let (rigid_h, compliant_h) = (mean(&|p| p.0.max_height), mean(&|p| p.1.max_height));
    let ratio = compliant_h / rigid_h;
    ensure!((ratio - 1.0).abs() <= 0.15, "nominal height ratio {ratio:.3} ({compliant_h:.4} vs {rigid_h:.4} m)");

    let tilted = paired(Scenario::TiltedLanding)?;
    let softer = tilted.iter().filter(|(r, c)| c.peak_landing_decel < r.peak_landing_decel).count();
    ensure!(softer * 5 >= tilted.len() * 4, "compliant decel lower in only {softer}/20 seeds");
    for (i, (_, c)) in tilted.iter().enumerate() {
        ensure!(
            c.min_spine_length < c.touchdown_spine_length,
            "seed {i}: spine did not compress ({} vs {})",
            c.min_spine_length,
            c.touchdown_spine_length
        );
        ensure!(c.front_foot_slip > 0.0, "seed {i}: no front-foot slip");
    }
    Ok(format!("height ratio {ratio:.3}; softer landing in {softer}/20 seeds"))
}

fn characterization_harness() -> Check {
    let cfg = SpineConfig::strong();
    let run = characterize(&cfg, &CharacterizeOptions::default()).map_err(|e| e.to_string())?;
    let report = preprocess(&run.samples, 1, 3.5).map_err(|e| e.to_string())?;
    for s in &report.kept {
        let model = cfg.spine_force(s.h_m).unwrap();
        let ok = match s.direction {
            SampleDirection::Compression => s.f_n >= model,
            SampleDirection::Extension => s.f_n <= model,
            SampleDirection::Model => true,
        };
        ensure!(ok, "{:?} sample {} N on the wrong side of {model} N at {} m", s.direction, s.f_n, s.h_m);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(613);
    for _ in 0..100 {
        let (a0, a1, a2) = (rng.gen_range(-100.0..100.0), rng.gen_range(-2000.0..2000.0), rng.gen_range(-1e4..1e4));
        let pts: Vec<(f64, f64)> = (0..121).map(|i| 0.08 + 0.001 * i as f64).map(|h| (h, a0 + a1 * h + a2 * h * h)).collect();
        let fit = polyfit2(&pts, None).map_err(|e| e.to_string())?;
        for (got, want) in [(fit.a0, a0), (fit.a1, a1), (fit.a2, a2)] {
            ensure!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "fit {got} vs {want}");
        }
    }

    let clean = characterize(&cfg, &CharacterizeOptions { sigma: 0.0, ..Default::default() }).map_err(|e| e.to_string())?;
    for _ in 0..10 {
        let mut samples = clean.samples.clone();
        let idx = rng.gen_range(0..samples.len());
        samples[idx].f_n = 1000.0;
        let removed = preprocess(&samples, 1, 3.5).map_err(|e| e.to_string())?.removed;
        ensure!(removed == vec![idx], "spike at {idx}: removed {removed:?}");
    }
    Ok(format!("{} retained samples bracket the model; fits exact; spikes isolated", report.kept.len()))
}

fn main() {
    type Criterion = (&'static str, fn() -> Check, f64);
    let criteria: [Criterion; 9] = [
        ("geometry", geometry, 1.0),
        ("force law", force_law, 1.0),
        ("degressive property and peak", degressive_and_peak, 10.0),
        ("lock fsm", lock_fsm, 5.0),
        ("cusum", cusum, 1.0),
        ("codec/transport", codec_transport, 30.0),
        ("simulator physics", simulator_physics, 120.0),
        ("jump behaviour", jump_behaviour, 600.0),
        ("characterization harness", characterization_harness, 10.0),
    ];
    let mut failed = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let result = check();
        let secs = start.elapsed().as_secs_f64();
        let result = result.and_then(|msg| {
            if secs <= budget {
                Ok(msg)
            } else {
                Err(format!("took {secs:.2} s, budget {budget} s"))
            }
        });
        match result {
            Ok(msg) => println!("PASS {name} ({secs:.2} s): {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name} ({secs:.2} s): {msg}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
