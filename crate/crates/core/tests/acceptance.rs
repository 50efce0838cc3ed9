//! Acceptance suite: end-to-end checks of the simulator against the
//! closed-form line solution, the dense nodal-analysis oracle, and the
//! track-circuit scenario generators. One test per criterion; each prints
//! a `criterion N PASS` line with the measured figures (visible with
//! `cargo test --test acceptance -- --nocapture`).

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tracksim_core::analytic::{analytic_profile, time_domain_sample, BoundaryCondition};
use tracksim_core::ladder::{
    frequency_response, node_phasors, partition, Anchor, ComponentId, ComponentKind, DamageCase,
    DamageEntry, LineProfile, NetworkSpec,
};
use tracksim_core::oracle::{extract_responses, nodal_solve};
use tracksim_core::scenarios::{
    ballast_damage, train_timeline, wheel_shunt_factor, BallastProfile, LineEnd, TrainSpec,
};
use tracksim_core::LineParams;

// ---------------------------------------------------------------------
// Tolerances and reference setup
// ---------------------------------------------------------------------

/// Ladder vs dense-oracle agreement, both Z and H at every node. Chosen
/// after conditioning analysis of the randomized suite at n = 117: the
/// worst observed disagreement sits below 1e-9 with both sides in f64.
const ORACLE_EQUIVALENCE_REL_TOL: f64 = 1e-9;

/// Frozen-value comparisons for quantities derived in high precision.
const DERIVED_REL_TOL: f64 = 1e-12;

/// Max relative error of the 50-generation Vmax/Imax curves vs the
/// closed-form solution. The provisional 2% bound was frozen to 0.2%
/// once the oracle-confirmed run measured 1.695e-3 (voltage) and
/// 5.3e-5 (current); the computation is deterministic, so the headroom
/// only covers future legitimate refactorings.
const CONVERGENCE_N50_MAX_REL_ERR: f64 = 2e-3;

/// Time-domain agreement at the transmitter for n = 50: max absolute
/// error over one period, as a fraction of the 115 V reported peak.
const WAVEFORM_MAX_ABS_ERR_FRACTION: f64 = 0.01;

/// Reported transmitter-end peak and its read-off uncertainty.
const TRANSMITTER_PEAK_V: f64 = 115.0;
const TRANSMITTER_PEAK_TOL_V: f64 = 1.0;

fn ref_params() -> LineParams {
    LineParams {
        r_per_m: 2.5e-3,
        l_per_m: 1.8e-6,
        g_per_m: 20e-6,
        c_per_m: 0.2e-9,
    }
}

fn ref_omega() -> f64 {
    2.0 * PI * 2300.0
}

fn ref_spec(generations: usize) -> NetworkSpec {
    NetworkSpec::from_line(
        &ref_params(),
        1170.0,
        generations,
        ref_omega(),
        Complex64::new(500.0, 0.0),
    )
    .unwrap()
}

fn ref_boundary() -> BoundaryCondition {
    BoundaryCondition {
        v0: Complex64::new(110.0, 0.0),
        z0: Complex64::new(500.0, 0.0),
        omega: ref_omega(),
        phi: 0.0,
    }
}

fn ref_train() -> TrainSpec {
    TrainSpec {
        wheelbase_count: 20,
        wheelbase_spacing: 10.0,
        wheel_resistance: 102.0408,
        speed: 100.0,
        entry_end: LineEnd::Receiver,
    }
}

fn receiver_anchored_profile(spec: &NetworkSpec, damage: &DamageCase) -> LineProfile {
    let responses = frequency_response(spec, damage).unwrap();
    node_phasors(
        &responses,
        spec,
        &Anchor::ReceiverVoltage(Complex64::new(110.0, 0.0)),
    )
    .unwrap()
}

/// Receiver current peak with the transmitter voltage pinned at 115 V.
fn receiver_current_at_fixed_transmitter(spec: &NetworkSpec, damage: &DamageCase) -> f64 {
    let responses = frequency_response(spec, damage).unwrap();
    let profile = node_phasors(
        &responses,
        spec,
        &Anchor::TransmitterVoltageMagnitude(TRANSMITTER_PEAK_V),
    )
    .unwrap();
    profile.receiver().current_peak()
}

/// Max over nodes of the relative Vmax (or Imax) error of the
/// n-generation ladder against the closed-form profile at the node
/// positions, anchored at the 110 V receiver voltage.
fn convergence_error(generations: usize) -> (f64, f64) {
    let spec = ref_spec(generations);
    let profile = receiver_anchored_profile(&spec, &DamageCase::empty());
    let xs: Vec<f64> = profile.nodes.iter().map(|n| n.x).collect();
    let reference = analytic_profile(&ref_params(), &ref_boundary(), &xs).unwrap();
    let mut v_err = 0.0f64;
    let mut i_err = 0.0f64;
    for (node, sample) in profile.nodes.iter().zip(reference.iter()) {
        v_err =
            v_err.max((node.voltage_peak() - sample.voltage_peak()).abs() / sample.voltage_peak());
        i_err =
            i_err.max((node.current_peak() - sample.current_peak()).abs() / sample.current_peak());
    }
    (v_err, i_err)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

// ---------------------------------------------------------------------
// 1. Uniform-line convergence
// ---------------------------------------------------------------------

#[test]
fn criterion_1_uniform_line_convergence() {
    let started = Instant::now();
    let e5 = convergence_error(5);
    let e10 = convergence_error(10);
    let e50 = convergence_error(50);
    let e100 = convergence_error(100);
    let elapsed = started.elapsed();

    assert!(
        e100.0 < e50.0 && e50.0 < e10.0 && e10.0 < e5.0,
        "Vmax error must shrink with generation count: \
         E(100)={:.3e} E(50)={:.3e} E(10)={:.3e} E(5)={:.3e}",
        e100.0,
        e50.0,
        e10.0,
        e5.0
    );
    assert!(
        e50.0 < CONVERGENCE_N50_MAX_REL_ERR,
        "E(50) voltage error {:.3e} exceeds {CONVERGENCE_N50_MAX_REL_ERR}",
        e50.0
    );
    assert!(
        e50.1 < CONVERGENCE_N50_MAX_REL_ERR,
        "E(50) current error {:.3e} exceeds {CONVERGENCE_N50_MAX_REL_ERR}",
        e50.1
    );
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "convergence study took {elapsed:?}, budget is 1 s"
    );
    println!(
        "criterion 1 PASS: E_v(5)={:.3e} E_v(10)={:.3e} E_v(50)={:.3e} E_v(100)={:.3e} \
         in {elapsed:?}",
        e5.0, e10.0, e50.0, e100.0
    );
}

// ---------------------------------------------------------------------
// 2. Transmitter-end voltage of the closed-form solution
// ---------------------------------------------------------------------

#[test]
fn criterion_2_analytic_transmitter_voltage() {
    let samples = analytic_profile(&ref_params(), &ref_boundary(), &[1170.0]).unwrap();
    let peak = samples[0].voltage_peak();
    assert!(
        (peak - TRANSMITTER_PEAK_V).abs() < TRANSMITTER_PEAK_TOL_V,
        "analytic |v(1170)| = {peak} V, expected {TRANSMITTER_PEAK_V} ± {TRANSMITTER_PEAK_TOL_V} V"
    );
    println!("criterion 2 PASS: analytic transmitter peak {peak:.4} V");
}

// ---------------------------------------------------------------------
// 3. Time-domain waveform agreement at x = 1170 m, n = 50
// ---------------------------------------------------------------------

#[test]
fn criterion_3_transmitter_waveform() {
    let spec = ref_spec(50);
    let ladder_phasor = receiver_anchored_profile(&spec, &DamageCase::empty())
        .transmitter()
        .voltage;
    let analytic_phasor =
        analytic_profile(&ref_params(), &ref_boundary(), &[1170.0]).unwrap()[0].voltage;

    let omega = ref_omega();
    let period = 2.0 * PI / omega;
    let samples = 10_000;
    let mut max_err = 0.0f64;
    for k in 0..=samples {
        let t = period * k as f64 / samples as f64;
        let v_ladder = time_domain_sample(ladder_phasor, omega, 0.0, t);
        let v_analytic = time_domain_sample(analytic_phasor, omega, 0.0, t);
        max_err = max_err.max((v_ladder - v_analytic).abs());
    }
    let budget = WAVEFORM_MAX_ABS_ERR_FRACTION * TRANSMITTER_PEAK_V;
    assert!(
        max_err < budget,
        "max waveform error {max_err:.4} V exceeds {budget:.4} V"
    );
    println!("criterion 3 PASS: max waveform error {max_err:.4} V over one period (budget {budget:.2} V)");
}

// ---------------------------------------------------------------------
// 4. Ladder sweep vs dense nodal oracle on randomized networks
// ---------------------------------------------------------------------

#[test]
fn criterion_4_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7261696c);
    let base = ref_params();
    let mut worst = 0.0f64;

    for case in 0..200 {
        // The first 117 cases cover every generation count once; the rest
        // draw at random.
        let n = if case < 117 {
            case + 1
        } else {
            rng.gen_range(1..=117)
        };
        let decade = |rng: &mut ChaCha8Rng| 10f64.powf(rng.gen_range(-3.0..3.0));
        let params = LineParams {
            r_per_m: base.r_per_m * decade(&mut rng),
            l_per_m: base.l_per_m * decade(&mut rng),
            g_per_m: base.g_per_m * decade(&mut rng),
            c_per_m: base.c_per_m * decade(&mut rng),
        };
        let z_out = Complex64::new(500.0 * 10f64.powf(rng.gen_range(-1.0..1.0)), 0.0);
        let spec = NetworkSpec::from_line(&params, 1170.0, n, ref_omega(), z_out).unwrap();

        let mut component_pool: Vec<ComponentId> = (1..=n)
            .flat_map(|g| {
                ComponentKind::ALL
                    .iter()
                    .map(move |&k| ComponentId::new(g, k))
            })
            .collect();
        component_pool.shuffle(&mut rng);
        let entry_count = rng.gen_range(0..=2 * n);
        let entries: Vec<DamageEntry> = component_pool
            .into_iter()
            .take(entry_count)
            .map(|component| DamageEntry {
                component,
                amount: 10f64.powf(rng.gen_range(-2.0..2.0)),
            })
            .collect();
        let damage = DamageCase::new(entries).unwrap();

        let sweep = frequency_response(&spec, &damage).unwrap();
        let dense = extract_responses(&nodal_solve(&spec, &damage).unwrap(), &spec).unwrap();
        assert_eq!(sweep.len(), dense.len());
        for (g, (a, b)) in sweep.iter().zip(dense.iter()).enumerate() {
            let z_err = rel(a.impedance, b.impedance);
            let h_err = rel(a.gain, b.gain);
            worst = worst.max(z_err).max(h_err);
            assert!(
                z_err < ORACLE_EQUIVALENCE_REL_TOL && h_err < ORACLE_EQUIVALENCE_REL_TOL,
                "case {case} (n={n}), node {g}: Z err {z_err:.3e}, H err {h_err:.3e}"
            );
        }
    }
    println!("criterion 4 PASS: 200 randomized cases, worst node error {worst:.3e}");
}

// ---------------------------------------------------------------------
// 5. Train-passage timeline and receiver current
// ---------------------------------------------------------------------

#[test]
fn criterion_5_train_scenario() {
    let spec = ref_spec(117);
    let timeline = train_timeline(&spec, &ref_train()).unwrap();
    assert_eq!(timeline.len(), 136);

    let factor = wheel_shunt_factor(5000.0, 102.0408);
    assert!(
        (factor - 0.02).abs() < 1e-6,
        "wheelset factor {factor} should round to 0.02"
    );

    // Expected occupancy window at step k (1-based), from the receiver
    // end: generations hi..lo with hi = min(117, 137-k), lo = max(1, 118-k).
    for (idx, entry) in timeline.iter().enumerate() {
        let k = idx + 1;
        let expected_t = k as f64 * 0.1;
        assert!((entry.t - expected_t).abs() < 1e-12);
        let hi = (137 - k).min(117);
        let lo = 118usize.saturating_sub(k).max(1);
        let expected: Vec<usize> = (lo..=hi).rev().collect();
        let actual: Vec<usize> = entry
            .damage
            .entries()
            .iter()
            .map(|e| e.component.generation)
            .collect();
        assert_eq!(actual, expected, "occupied window at t = {}", entry.t);
        for e in entry.damage.entries() {
            assert_eq!(e.component.kind, ComponentKind::ShuntR);
            assert_eq!(e.amount, factor);
        }
    }
    // Spot rows: first, full window, slide, exit, last.
    assert_eq!(
        timeline[0].damage.entries()[0].component,
        ComponentId::new(117, ComponentKind::ShuntR)
    );
    assert_eq!(timeline[19].damage.len(), 20);
    assert_eq!(timeline[19].damage.entries()[19].component.generation, 98);
    assert_eq!(timeline[20].damage.entries()[0].component.generation, 116);
    assert_eq!(
        timeline[135].damage.entries()[0].component,
        ComponentId::new(1, ComponentKind::ShuntR)
    );

    // Receiver current: below the undamaged level at every occupied step,
    // with the minimum while the full train is on the track.
    let undamaged = receiver_current_at_fixed_transmitter(&spec, &DamageCase::empty());
    let mut min_current = f64::INFINITY;
    let mut min_window = 0usize;
    for entry in &timeline {
        let current = receiver_current_at_fixed_transmitter(&spec, &entry.damage);
        assert!(
            current < undamaged,
            "receiver current {current} not below undamaged {undamaged} at t = {}",
            entry.t
        );
        if current < min_current {
            min_current = current;
            min_window = entry.damage.len();
        }
    }
    assert_eq!(
        min_window, 20,
        "receiver current minimum should occur with the full 20-wheelset window on track"
    );
    println!(
        "criterion 5 PASS: 136 steps, undamaged receiver current {undamaged:.4} A, \
         minimum {min_current:.4} A at full occupancy"
    );
}

// ---------------------------------------------------------------------
// 6. Ballast degradation lowers the receiver current
// ---------------------------------------------------------------------

#[test]
fn criterion_6_ballast_scenario() {
    let spec = ref_spec(117);
    let undamaged = receiver_current_at_fixed_transmitter(&spec, &DamageCase::empty());

    let profiles = [
        BallastProfile::smooth((18, 107), 0.1, 2.0).unwrap(),
        BallastProfile::smooth((18, 107), 0.5, 1.2).unwrap(),
        BallastProfile::new((18, 107), vec![0.8; 90], vec![1.0; 90]).unwrap(),
    ];
    let mut currents = Vec::new();
    for profile in &profiles {
        let damage = ballast_damage(profile).unwrap();
        let current = receiver_current_at_fixed_transmitter(&spec, &damage);
        assert!(
            current < undamaged,
            "degraded receiver current {current} not below undamaged {undamaged}"
        );
        currents.push(current);
    }
    println!(
        "criterion 6 PASS: undamaged {undamaged:.4} A, degraded {:?} A",
        currents
            .iter()
            .map(|c| (c * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    );
}

// ---------------------------------------------------------------------
// 7. Runtime of one evaluation and of the full train sweep
// ---------------------------------------------------------------------

#[test]
fn criterion_7_performance() {
    let spec = ref_spec(117);
    let damage = ballast_damage(&BallastProfile::smooth((18, 107), 0.1, 2.0).unwrap()).unwrap();

    // Best of a few runs, so scheduler noise does not dominate.
    let mut single_eval = f64::INFINITY;
    for _ in 0..5 {
        let started = Instant::now();
        let responses = frequency_response(&spec, &damage).unwrap();
        let profile = node_phasors(
            &responses,
            &spec,
            &Anchor::TransmitterVoltageMagnitude(TRANSMITTER_PEAK_V),
        )
        .unwrap();
        assert!(profile.receiver().current_peak() > 0.0);
        single_eval = single_eval.min(started.elapsed().as_secs_f64());
    }
    assert!(
        single_eval < 0.010,
        "117-generation damage-case evaluation took {single_eval:.6} s, budget 10 ms"
    );

    let started = Instant::now();
    let timeline = train_timeline(&spec, &ref_train()).unwrap();
    let mut checksum = 0.0f64;
    for entry in &timeline {
        checksum += receiver_current_at_fixed_transmitter(&spec, &entry.damage);
    }
    let sweep = started.elapsed().as_secs_f64();
    assert!(checksum.is_finite());
    assert!(
        sweep < 1.0,
        "136-step train sweep took {sweep:.4} s, budget 1 s"
    );
    println!(
        "criterion 7 PASS: single evaluation {:.3} ms, train sweep {:.1} ms",
        single_eval * 1e3,
        sweep * 1e3
    );
}

// ---------------------------------------------------------------------
// 8. Property checks that need no figure data
// ---------------------------------------------------------------------

#[test]
fn criterion_8_property_suites() {
    let spec = ref_spec(117);

    // Base case: the receiver node response is exactly (z_out, 1).
    let responses = frequency_response(&spec, &DamageCase::empty()).unwrap();
    assert_eq!(responses[117].impedance, spec.z_out);
    assert_eq!(responses[117].gain, Complex64::ONE);

    // Identity damage: amounts of 1 everywhere are bit-identical to the
    // empty case.
    let all_ones: Vec<DamageEntry> = (1..=117)
        .flat_map(|g| {
            ComponentKind::ALL.iter().map(move |&kind| DamageEntry {
                component: ComponentId::new(g, kind),
                amount: 1.0,
            })
        })
        .collect();
    let identity = frequency_response(&spec, &DamageCase::new(all_ones).unwrap()).unwrap();
    assert_eq!(identity, responses);

    // Passivity: positive real part of Z at every node for a spread of
    // seeded damage cases.
    let mut rng = ChaCha8Rng::seed_from_u64(0x62616c61);
    for _ in 0..25 {
        let entries: Vec<DamageEntry> = (0..rng.gen_range(0..40))
            .map(|_| DamageEntry {
                component: ComponentId::new(
                    rng.gen_range(1..=117),
                    ComponentKind::ALL[rng.gen_range(0..6)],
                ),
                amount: 10f64.powf(rng.gen_range(-2.0..2.0)),
            })
            .scan(Vec::new(), |seen: &mut Vec<ComponentId>, e| {
                if seen.contains(&e.component) {
                    Some(None)
                } else {
                    seen.push(e.component);
                    Some(Some(e))
                }
            })
            .flatten()
            .collect();
        let damage = DamageCase::new(entries).unwrap();
        for response in frequency_response(&spec, &damage).unwrap() {
            assert!(response.impedance.re > 0.0);
        }
    }

    // Linearity: scaling the anchor scales every phasor.
    let alpha = Complex64::new(-1.75, 0.5);
    let base = node_phasors(
        &responses,
        &spec,
        &Anchor::ReceiverVoltage(Complex64::new(110.0, 0.0)),
    )
    .unwrap();
    let scaled = node_phasors(
        &responses,
        &spec,
        &Anchor::ReceiverVoltage(Complex64::new(110.0, 0.0) * alpha),
    )
    .unwrap();
    for (a, b) in base.nodes.iter().zip(scaled.nodes.iter()) {
        assert!(rel(b.voltage, alpha * a.voltage) < DERIVED_REL_TOL);
        assert!(rel(b.current, alpha * a.current) < DERIVED_REL_TOL);
    }

    // Receiver current follows from the anchored voltage exactly.
    assert_eq!(
        base.receiver().current,
        base.receiver().voltage / spec.z_out
    );

    // Partition/index-shift law on a seeded damage case.
    let entries: Vec<DamageEntry> = (1..=30)
        .map(|g| DamageEntry {
            component: ComponentId::new(g, ComponentKind::ALL[g % 6]),
            amount: 0.5 + g as f64 / 30.0,
        })
        .collect();
    let damage = DamageCase::new(entries).unwrap();
    let (first, rest) = partition(&damage);
    assert!(first.entries().iter().all(|e| e.component.generation == 1));
    assert_eq!(first.len() + rest.len(), damage.len());
    for e in rest.entries() {
        let original = ComponentId::new(e.component.generation + 1, e.component.kind);
        assert!(damage
            .entries()
            .iter()
            .any(|d| d.component == original && d.amount == e.amount));
    }

    println!("criterion 8 PASS: base case, identity damage, passivity, linearity, partition laws");
}
