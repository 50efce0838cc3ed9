//! Batch front-end for the ladder-network line simulator: reads a run
//! configuration, executes one of the `validate`/`simulate`/`train`/
//! `sweep` commands, and emits CSV suitable for plotting and regression
//! diffing.

pub mod config;
pub mod output;

use std::fmt;
use std::io::Write;

use num_complex::Complex64;

use tracksim_core::analytic::{analytic_profile, BoundaryCondition};
use tracksim_core::error::Error as CoreError;
use tracksim_core::ladder::{
    frequency_response, node_phasors, Anchor, DamageCase, LineProfile, NetworkSpec,
};
use tracksim_core::scenarios::{ballast_damage, train_timeline, BallastProfile, TrainSpec};

use config::{AnchorConfig, ConfigError, RunConfig};
use output::{cell, write_preamble, write_row};

/// Command selected on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    /// Compare ladder approximations against the closed-form solution for
    /// the requested generation counts.
    Validate { generations: Option<Vec<usize>> },
    /// Emit the node phasors of one (possibly damaged) network.
    Simulate,
    /// Emit the receiver current over a train passage.
    Train,
    /// Emit the transmitter impedance and gain over a frequency grid.
    Sweep,
}

/// Errors mapped to process exit codes: configuration problems exit 2,
/// singular networks exit 3, I/O failures exit 4.
#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Invalid(CoreError),
    Singular(CoreError),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Invalid(_) => 2,
            CliError::Singular(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "configuration error: {e}"),
            CliError::Invalid(e) => write!(f, "configuration error: {e}"),
            CliError::Singular(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_)
            | CoreError::InvalidDamage(_)
            | CoreError::Unsupported(_) => CliError::Invalid(e),
            _ => CliError::Singular(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError::Invalid(CoreError::InvalidInput(message.into()))
}

fn omega(config: &RunConfig) -> f64 {
    2.0 * std::f64::consts::PI * config.frequency_hz
}

fn build_spec(config: &RunConfig, generations: usize) -> Result<NetworkSpec, CliError> {
    Ok(NetworkSpec::from_line(
        &config.line,
        config.length_m,
        generations,
        omega(config),
        Complex64::new(config.load_ohm, 0.0),
    )?)
}

fn anchor(config: &RunConfig) -> Anchor {
    match config.anchor {
        AnchorConfig::Receiver { volts, phase_deg } => {
            Anchor::ReceiverVoltage(Complex64::from_polar(volts, phase_deg.to_radians()))
        }
        AnchorConfig::TransmitterMagnitude { volts } => Anchor::TransmitterVoltageMagnitude(volts),
    }
}

fn anchored_profile(
    config: &RunConfig,
    spec: &NetworkSpec,
    damage: &DamageCase,
) -> Result<LineProfile, CliError> {
    let responses = frequency_response(spec, damage)?;
    Ok(node_phasors(&responses, spec, &anchor(config))?)
}

/// Effective static damage for `simulate`/`sweep`: the ballast profile
/// (when configured) plus the explicit entries. Duplicates are rejected.
fn static_damage(config: &RunConfig) -> Result<DamageCase, CliError> {
    let mut entries = Vec::new();
    if let Some(ballast) = &config.ballast {
        let profile = match (&ballast.rb_factors, &ballast.c_factors) {
            (Some(rb), Some(c)) => BallastProfile::new(ballast.span, rb.clone(), c.clone())?,
            _ => BallastProfile::smooth(ballast.span, ballast.rb_min, ballast.c_max)?,
        };
        for warning in profile.direction_warnings() {
            eprintln!("warning: {warning}");
        }
        entries.extend(ballast_damage(&profile)?.entries().to_vec());
    }
    entries.extend(config.damage_entries.iter().copied());
    Ok(DamageCase::new(entries)?)
}

/// The receiver-side voltage phasor anchoring the analytic reference. A
/// transmitter anchor is converted through the closed-form transmitter/
/// receiver magnitude ratio.
fn analytic_boundary(config: &RunConfig) -> Result<BoundaryCondition, CliError> {
    let z0 = Complex64::new(config.load_ohm, 0.0);
    let w = omega(config);
    let v0 = match config.anchor {
        AnchorConfig::Receiver { volts, phase_deg } => {
            Complex64::from_polar(volts, phase_deg.to_radians())
        }
        AnchorConfig::TransmitterMagnitude { volts } => {
            let unit = BoundaryCondition {
                v0: Complex64::ONE,
                z0,
                omega: w,
                phi: config.phi_rad,
            };
            let transmitter =
                analytic_profile(&config.line, &unit, &[config.length_m])?[0].voltage_peak();
            Complex64::new(volts / transmitter, 0.0)
        }
    };
    Ok(BoundaryCondition {
        v0,
        z0,
        omega: w,
        phi: config.phi_rad,
    })
}

/// Runs `command` against `config`, writing CSV to `out`.
pub fn run(command: &Command, config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate { generations } => run_validate(config, generations.as_deref(), out),
        Command::Simulate => run_simulate(config, out),
        Command::Train => run_train(config, out),
        Command::Sweep => run_sweep(config, out),
    }
}

fn run_validate(
    config: &RunConfig,
    generations_override: Option<&[usize]>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let requested: Vec<usize> =
        match generations_override {
            Some(list) if !list.is_empty() => list.to_vec(),
            _ if !config.validate_generations.is_empty() => config.validate_generations.clone(),
            _ => return Err(invalid(
                "validate needs generation counts: set validate.generations or pass --generations",
            )),
        };
    if requested.contains(&0) {
        return Err(invalid("generation counts must be at least 1"));
    }
    // Echo the effective list so the header reproduces this exact run.
    let mut effective = config.clone();
    effective.validate_generations = requested.clone();

    let boundary = analytic_boundary(config)?;

    // Node positions of different ladders that coincide physically are
    // merged onto one row; the key quantizes x at a 1e-9 relative grid,
    // far below any node spacing.
    let quantize = |x: f64| -> i64 { (x / config.length_m * 1e9).round() as i64 };
    struct Row {
        x: f64,
        per_n: Vec<Option<(f64, f64)>>,
    }
    let mut rows: std::collections::BTreeMap<i64, Row> = std::collections::BTreeMap::new();
    let mut summary = Vec::new();

    for (idx, &n) in requested.iter().enumerate() {
        let spec = build_spec(config, n)?;
        let profile = anchored_profile(config, &spec, &DamageCase::empty())?;
        let xs: Vec<f64> = profile.nodes.iter().map(|node| node.x).collect();
        let reference = analytic_profile(&config.line, &boundary, &xs)?;

        let mut v_err = 0.0f64;
        let mut i_err = 0.0f64;
        for (node, sample) in profile.nodes.iter().zip(reference.iter()) {
            v_err = v_err
                .max((node.voltage_peak() - sample.voltage_peak()).abs() / sample.voltage_peak());
            i_err = i_err
                .max((node.current_peak() - sample.current_peak()).abs() / sample.current_peak());
            let row = rows.entry(quantize(node.x)).or_insert_with(|| Row {
                x: node.x,
                per_n: vec![None; requested.len()],
            });
            row.per_n[idx] = Some((node.voltage_peak(), node.current_peak()));
        }
        summary.push(format!("vmax_max_rel_err[n={n}] = {}", cell(v_err)));
        summary.push(format!("imax_max_rel_err[n={n}] = {}", cell(i_err)));
    }

    write_preamble(out, "validate", &effective, &summary)?;
    let mut header = vec![
        "x_m".to_string(),
        "vmax_analytic_v".to_string(),
        "imax_analytic_a".to_string(),
    ];
    for &n in &requested {
        header.push(format!("vmax_n{n}_v"));
        header.push(format!("imax_n{n}_a"));
    }
    write_row(out, &header)?;

    let xs: Vec<f64> = rows.values().map(|row| row.x).collect();
    let reference = analytic_profile(&config.line, &boundary, &xs)?;
    for (row, sample) in rows.values().zip(reference.iter()) {
        let mut cells = vec![
            cell(row.x),
            cell(sample.voltage_peak()),
            cell(sample.current_peak()),
        ];
        for slot in &row.per_n {
            match slot {
                Some((vmax, imax)) => {
                    cells.push(cell(*vmax));
                    cells.push(cell(*imax));
                }
                None => {
                    cells.push(String::new());
                    cells.push(String::new());
                }
            }
        }
        write_row(out, &cells)?;
    }
    Ok(())
}

fn run_simulate(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = build_spec(config, config.generations)?;
    let damage = static_damage(config)?;
    let profile = anchored_profile(config, &spec, &damage)?;

    write_preamble(out, "simulate", config, &[])?;
    write_row(
        out,
        &[
            "node".to_string(),
            "x_m".to_string(),
            "v_re_v".to_string(),
            "v_im_v".to_string(),
            "vmax_v".to_string(),
            "i_re_a".to_string(),
            "i_im_a".to_string(),
            "imax_a".to_string(),
        ],
    )?;
    for node in &profile.nodes {
        write_row(
            out,
            &[
                node.node.to_string(),
                cell(node.x),
                cell(node.voltage.re),
                cell(node.voltage.im),
                cell(node.voltage_peak()),
                cell(node.current.re),
                cell(node.current.im),
                cell(node.current_peak()),
            ],
        )?;
    }
    Ok(())
}

fn run_train(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let Some(train) = &config.train else {
        return Err(invalid("the train command needs a train.* block"));
    };
    if config.ballast.is_some() || !config.damage_entries.is_empty() {
        return Err(invalid(
            "the train command models a passage over an intact track; \
             remove the ballast/damage blocks",
        ));
    }
    let spec = build_spec(config, config.generations)?;
    let train_spec = TrainSpec {
        wheelbase_count: train.wheelbase_count,
        wheelbase_spacing: train.wheelbase_spacing_m,
        wheel_resistance: train.wheel_resistance_ohm,
        speed: train.speed_m_per_s,
        entry_end: train.entry,
    };
    let timeline = train_timeline(&spec, &train_spec)?;

    write_preamble(out, "train", config, &[])?;
    write_row(out, &["t_s".to_string(), "receiver_imax_a".to_string()])?;
    for entry in &timeline {
        let profile = anchored_profile(config, &spec, &entry.damage)?;
        write_row(
            out,
            &[cell(entry.t), cell(profile.receiver().current_peak())],
        )?;
    }
    Ok(())
}

fn run_sweep(config: &RunConfig, out: &mut dyn Write) -> Result<(), CliError> {
    let Some(sweep) = &config.sweep else {
        return Err(invalid("the sweep command needs a sweep.* block"));
    };
    let damage = static_damage(config)?;

    write_preamble(out, "sweep", config, &[])?;
    write_row(
        out,
        &[
            "f_hz".to_string(),
            "z_re_ohm".to_string(),
            "z_im_ohm".to_string(),
            "z_abs_ohm".to_string(),
            "h_re".to_string(),
            "h_im".to_string(),
            "h_abs".to_string(),
        ],
    )?;
    for k in 0..sweep.points {
        let frequency = if sweep.points == 1 {
            sweep.start_hz
        } else {
            sweep.start_hz + (sweep.stop_hz - sweep.start_hz) * k as f64 / (sweep.points - 1) as f64
        };
        let spec = NetworkSpec::from_line(
            &config.line,
            config.length_m,
            config.generations,
            2.0 * std::f64::consts::PI * frequency,
            Complex64::new(config.load_ohm, 0.0),
        )?;
        let responses = frequency_response(&spec, &damage)?;
        let transmitter = responses[0];
        write_row(
            out,
            &[
                cell(frequency),
                cell(transmitter.impedance.re),
                cell(transmitter.impedance.im),
                cell(transmitter.impedance.norm()),
                cell(transmitter.gain.re),
                cell(transmitter.gain.im),
                cell(transmitter.gain.norm()),
            ],
        )?;
    }
    Ok(())
}
