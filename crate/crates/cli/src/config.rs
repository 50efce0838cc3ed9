//! Run-configuration parsing and canonical echoing.
//!
//! The format is flat `key = value` lines grouped by dotted section
//! prefixes (`line.`, `anchor.`, `validate.`, `damage.`, `ballast.`,
//! `train.`, `sweep.`), with `#` comments and blank lines ignored. Every
//! run echoes its fully resolved configuration into the CSV header, and
//! that echo re-parses to the identical [`RunConfig`].

use std::collections::BTreeMap;
use std::fmt;

use tracksim_core::ladder::{ComponentId, ComponentKind, DamageEntry};
use tracksim_core::scenarios::LineEnd;
use tracksim_core::LineParams;

/// Configuration error with the offending source position when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            column: Some(column),
            message: message.into(),
        }
    }

    fn global(message: impl Into<String>) -> Self {
        Self {
            line: None,
            column: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            _ => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// How absolute node phasors are anchored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnchorConfig {
    /// Receiver voltage phasor given as magnitude and phase.
    Receiver { volts: f64, phase_deg: f64 },
    /// Transmitter voltage peak; phases are referenced to the transmitter.
    TransmitterMagnitude { volts: f64 },
}

/// Ballast degradation block: a generation span with either explicit
/// factor lists or the parameters of the default smooth profile.
#[derive(Debug, Clone, PartialEq)]
pub struct BallastConfig {
    pub span: (usize, usize),
    pub rb_min: f64,
    pub c_max: f64,
    pub rb_factors: Option<Vec<f64>>,
    pub c_factors: Option<Vec<f64>>,
}

/// Train-passage block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub wheelbase_count: usize,
    pub wheelbase_spacing_m: f64,
    pub wheel_resistance_ohm: f64,
    pub speed_m_per_s: f64,
    pub entry: LineEnd,
}

/// Frequency-sweep block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
}

/// Fully resolved run configuration with all defaults applied.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub line: LineParams,
    pub length_m: f64,
    pub generations: usize,
    pub frequency_hz: f64,
    pub load_ohm: f64,
    pub anchor: AnchorConfig,
    /// Reference phase offset of the `e^{j(ωt+φ)}` carrier (rad).
    pub phi_rad: f64,
    /// Generation counts compared by the `validate` command.
    pub validate_generations: Vec<usize>,
    /// Explicit damage entries applied by `simulate` and `sweep`.
    pub damage_entries: Vec<DamageEntry>,
    pub ballast: Option<BallastConfig>,
    pub train: Option<TrainConfig>,
    pub sweep: Option<SweepConfig>,
}

const DEFAULT_ANCHOR_VOLTS: f64 = 110.0;
const DEFAULT_BALLAST_RB_MIN: f64 = 0.1;
const DEFAULT_BALLAST_C_MAX: f64 = 2.0;

fn parse_component(text: &str) -> Result<ComponentId, String> {
    let (label, generation) = text
        .rsplit_once('_')
        .ok_or_else(|| format!("component '{text}' must look like rb_18 or l1_3"))?;
    let kind = ComponentKind::ALL
        .into_iter()
        .find(|k| k.label() == label)
        .ok_or_else(|| {
            format!("unknown component kind '{label}' (expected r1, r2, l1, l2, rb, or c)")
        })?;
    let generation: usize = generation
        .parse()
        .map_err(|_| format!("bad generation index '{generation}' in component '{text}'"))?;
    if generation == 0 {
        return Err(format!("generation index in '{text}' must be at least 1"));
    }
    Ok(ComponentId::new(generation, kind))
}

fn parse_damage_entries(value: &str) -> Result<Vec<DamageEntry>, String> {
    let mut entries = Vec::new();
    for part in value.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (component, amount) = part
            .split_once(':')
            .ok_or_else(|| format!("damage entry '{part}' must look like rb_18:0.5"))?;
        let component = parse_component(component.trim())?;
        let amount: f64 = amount
            .trim()
            .parse()
            .map_err(|_| format!("bad damage amount in '{part}'"))?;
        entries.push(DamageEntry { component, amount });
    }
    Ok(entries)
}

/// One raw `key = value` occurrence with its source position.
struct RawEntry {
    value: String,
    line: usize,
    key_column: usize,
    value_column: usize,
}

struct RawConfig {
    entries: BTreeMap<String, RawEntry>,
}

impl RawConfig {
    fn take(&mut self, key: &str) -> Option<RawEntry> {
        self.entries.remove(key)
    }

    fn take_parsed<T: std::str::FromStr>(
        &mut self,
        key: &str,
        what: &str,
    ) -> Result<Option<T>, ConfigError> {
        match self.take(key) {
            None => Ok(None),
            Some(entry) => entry.value.parse().map(Some).map_err(|_| {
                ConfigError::at(
                    entry.line,
                    entry.value_column,
                    format!("{key}: expected {what}, got '{}'", entry.value),
                )
            }),
        }
    }

    fn require_parsed<T: std::str::FromStr>(
        &mut self,
        key: &str,
        what: &str,
    ) -> Result<T, ConfigError> {
        self.take_parsed(key, what)?
            .ok_or_else(|| ConfigError::global(format!("missing required key '{key}'")))
    }

    fn has_prefix(&self, prefix: &str) -> bool {
        self.entries.keys().any(|k| k.starts_with(prefix))
    }
}

fn tokenize(text: &str) -> Result<RawConfig, ConfigError> {
    let mut entries: BTreeMap<String, RawEntry> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let uncommented = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        if uncommented.trim().is_empty() {
            continue;
        }
        let Some(eq) = uncommented.find('=') else {
            return Err(ConfigError::at(
                line_no,
                1,
                format!("expected 'key = value', got '{}'", uncommented.trim()),
            ));
        };
        let key_part = &uncommented[..eq];
        let key = key_part.trim();
        let key_column = raw_line.find(key).map_or(1, |p| p + 1);
        if key.is_empty() {
            return Err(ConfigError::at(line_no, 1, "empty key before '='"));
        }
        let value_part = &uncommented[eq + 1..];
        let value = value_part.trim();
        let value_column = eq + 2 + value_part.len() - value_part.trim_start().len();
        if entries.contains_key(key) {
            return Err(ConfigError::at(
                line_no,
                key_column,
                format!("duplicate key '{key}'"),
            ));
        }
        entries.insert(
            key.to_string(),
            RawEntry {
                value: value.to_string(),
                line: line_no,
                key_column,
                value_column,
            },
        );
    }
    Ok(RawConfig { entries })
}

fn parse_float_list(entry: &RawEntry, key: &str) -> Result<Vec<f64>, ConfigError> {
    entry
        .value
        .split(',')
        .map(|part| {
            part.trim().parse::<f64>().map_err(|_| {
                ConfigError::at(
                    entry.line,
                    entry.value_column,
                    format!("{key}: bad number '{}'", part.trim()),
                )
            })
        })
        .collect()
}

fn parse_usize_list(entry: &RawEntry, key: &str) -> Result<Vec<usize>, ConfigError> {
    entry
        .value
        .split(',')
        .map(|part| {
            part.trim().parse::<usize>().map_err(|_| {
                ConfigError::at(
                    entry.line,
                    entry.value_column,
                    format!("{key}: bad positive integer '{}'", part.trim()),
                )
            })
        })
        .collect()
}

fn check_positive(value: f64, key: &str) -> Result<f64, ConfigError> {
    if !value.is_finite() || value <= 0.0 {
        return Err(ConfigError::global(format!(
            "{key} must be finite and positive, got {value}"
        )));
    }
    Ok(value)
}

fn check_non_negative(value: f64, key: &str) -> Result<f64, ConfigError> {
    if !value.is_finite() || value < 0.0 {
        return Err(ConfigError::global(format!(
            "{key} must be finite and non-negative, got {value}"
        )));
    }
    Ok(value)
}

/// Parses and validates a configuration, applying and materializing all
/// defaults (anchor = receiver 110 V∠0°, φ = 0).
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut raw = tokenize(text)?;

    let line = LineParams {
        r_per_m: check_non_negative(
            raw.require_parsed("line.r_per_m", "a number (Ω/m)")?,
            "line.r_per_m",
        )?,
        l_per_m: check_non_negative(
            raw.require_parsed("line.l_per_m", "a number (H/m)")?,
            "line.l_per_m",
        )?,
        g_per_m: check_non_negative(
            raw.require_parsed("line.g_per_m", "a number (S/m)")?,
            "line.g_per_m",
        )?,
        c_per_m: check_non_negative(
            raw.require_parsed("line.c_per_m", "a number (F/m)")?,
            "line.c_per_m",
        )?,
    };
    line.validate()
        .map_err(|e| ConfigError::global(e.to_string()))?;
    let length_m = check_positive(
        raw.require_parsed("line.length_m", "a number (m)")?,
        "line.length_m",
    )?;
    let generations: usize = raw.require_parsed("line.generations", "a positive integer")?;
    if generations == 0 {
        return Err(ConfigError::global("line.generations must be at least 1"));
    }
    let frequency_hz = check_positive(
        raw.require_parsed("line.frequency_hz", "a number (Hz)")?,
        "line.frequency_hz",
    )?;
    let load_ohm = check_positive(
        raw.require_parsed("line.load_ohm", "a number (Ω)")?,
        "line.load_ohm",
    )?;

    let anchor_kind = raw.take("anchor.kind");
    let anchor_volts = raw.take_parsed::<f64>("anchor.voltage", "a number (V)")?;
    let anchor_phase = raw.take_parsed::<f64>("anchor.phase_deg", "a number (degrees)")?;
    let volts = check_non_negative(
        anchor_volts.unwrap_or(DEFAULT_ANCHOR_VOLTS),
        "anchor.voltage",
    )?;
    let anchor = match &anchor_kind {
        None => AnchorConfig::Receiver {
            volts,
            phase_deg: anchor_phase.unwrap_or(0.0),
        },
        Some(entry) if entry.value == "receiver" => AnchorConfig::Receiver {
            volts,
            phase_deg: anchor_phase.unwrap_or(0.0),
        },
        Some(entry) if entry.value == "transmitter" => {
            if anchor_phase.is_some() {
                return Err(ConfigError::global(
                    "anchor.phase_deg only applies to anchor.kind = receiver",
                ));
            }
            AnchorConfig::TransmitterMagnitude { volts }
        }
        Some(entry) => {
            return Err(ConfigError::at(
                entry.line,
                entry.value_column,
                format!(
                    "anchor.kind must be 'receiver' or 'transmitter', got '{}'",
                    entry.value
                ),
            ));
        }
    };
    let phi_rad = raw
        .take_parsed::<f64>("anchor.phi_rad", "a number (rad)")?
        .unwrap_or(0.0);

    let validate_generations = match raw.take("validate.generations") {
        None => Vec::new(),
        Some(entry) => {
            let list = parse_usize_list(&entry, "validate.generations")?;
            if list.contains(&0) {
                return Err(ConfigError::at(
                    entry.line,
                    entry.value_column,
                    "validate.generations entries must be at least 1",
                ));
            }
            list
        }
    };

    let damage_entries = match raw.take("damage.entries") {
        None => Vec::new(),
        Some(entry) => parse_damage_entries(&entry.value)
            .map_err(|msg| ConfigError::at(entry.line, entry.value_column, msg))?,
    };

    let ballast = if raw.has_prefix("ballast.") {
        let span_entry = raw.take("ballast.span").ok_or_else(|| {
            ConfigError::global("ballast block present but 'ballast.span' is missing")
        })?;
        let span_list = parse_usize_list(&span_entry, "ballast.span")?;
        let [lo, hi] = span_list[..] else {
            return Err(ConfigError::at(
                span_entry.line,
                span_entry.value_column,
                "ballast.span must be 'lo,hi'",
            ));
        };
        let rb_min = check_positive(
            raw.take_parsed::<f64>("ballast.rb_min", "a number")?
                .unwrap_or(DEFAULT_BALLAST_RB_MIN),
            "ballast.rb_min",
        )?;
        let c_max = check_positive(
            raw.take_parsed::<f64>("ballast.c_max", "a number")?
                .unwrap_or(DEFAULT_BALLAST_C_MAX),
            "ballast.c_max",
        )?;
        let rb_factors = match raw.take("ballast.rb_factors") {
            None => None,
            Some(entry) => Some(parse_float_list(&entry, "ballast.rb_factors")?),
        };
        let c_factors = match raw.take("ballast.c_factors") {
            None => None,
            Some(entry) => Some(parse_float_list(&entry, "ballast.c_factors")?),
        };
        if rb_factors.is_some() != c_factors.is_some() {
            return Err(ConfigError::global(
                "ballast.rb_factors and ballast.c_factors must be given together",
            ));
        }
        Some(BallastConfig {
            span: (lo, hi),
            rb_min,
            c_max,
            rb_factors,
            c_factors,
        })
    } else {
        None
    };

    let train = if raw.has_prefix("train.") {
        let wheelbase_count: usize =
            raw.require_parsed("train.wheelbase_count", "a positive integer")?;
        let wheelbase_spacing_m = check_positive(
            raw.require_parsed("train.wheelbase_spacing_m", "a number (m)")?,
            "train.wheelbase_spacing_m",
        )?;
        let wheel_resistance_ohm = check_positive(
            raw.require_parsed("train.wheel_resistance_ohm", "a number (Ω)")?,
            "train.wheel_resistance_ohm",
        )?;
        let speed_m_per_s = check_positive(
            raw.require_parsed("train.speed_m_per_s", "a number (m/s)")?,
            "train.speed_m_per_s",
        )?;
        let entry = match raw.take("train.entry") {
            None => LineEnd::Receiver,
            Some(entry) => match entry.value.as_str() {
                "receiver" => LineEnd::Receiver,
                "transmitter" => LineEnd::Transmitter,
                other => {
                    return Err(ConfigError::at(
                        entry.line,
                        entry.value_column,
                        format!("train.entry must be 'receiver' or 'transmitter', got '{other}'"),
                    ))
                }
            },
        };
        Some(TrainConfig {
            wheelbase_count,
            wheelbase_spacing_m,
            wheel_resistance_ohm,
            speed_m_per_s,
            entry,
        })
    } else {
        None
    };

    let sweep = if raw.has_prefix("sweep.") {
        let start_hz = check_positive(
            raw.require_parsed("sweep.start_hz", "a number (Hz)")?,
            "sweep.start_hz",
        )?;
        let stop_hz = check_positive(
            raw.require_parsed("sweep.stop_hz", "a number (Hz)")?,
            "sweep.stop_hz",
        )?;
        let points: usize = raw.require_parsed("sweep.points", "a positive integer")?;
        if points == 0 {
            return Err(ConfigError::global("sweep.points must be at least 1"));
        }
        if stop_hz < start_hz {
            return Err(ConfigError::global(
                "sweep.stop_hz must not be below sweep.start_hz",
            ));
        }
        Some(SweepConfig {
            start_hz,
            stop_hz,
            points,
        })
    } else {
        None
    };

    if let Some((key, entry)) = raw.entries.iter().next() {
        return Err(ConfigError::at(
            entry.line,
            entry.key_column,
            format!("unknown key '{key}'"),
        ));
    }

    Ok(RunConfig {
        line,
        length_m,
        generations,
        frequency_hz,
        load_ohm,
        anchor,
        phi_rad,
        validate_generations,
        damage_entries,
        ballast,
        train,
        sweep,
    })
}

/// Serializes a float with 17 significant digits, enough for an exact
/// f64 round trip.
pub fn fmt_f64(value: f64) -> String {
    format!("{value:.16e}")
}

fn fmt_float_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| fmt_f64(*v))
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Canonical `key = value` lines that re-parse to this configuration.
    pub fn echo_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("line.r_per_m = {}", fmt_f64(self.line.r_per_m)),
            format!("line.l_per_m = {}", fmt_f64(self.line.l_per_m)),
            format!("line.g_per_m = {}", fmt_f64(self.line.g_per_m)),
            format!("line.c_per_m = {}", fmt_f64(self.line.c_per_m)),
            format!("line.length_m = {}", fmt_f64(self.length_m)),
            format!("line.generations = {}", self.generations),
            format!("line.frequency_hz = {}", fmt_f64(self.frequency_hz)),
            format!("line.load_ohm = {}", fmt_f64(self.load_ohm)),
        ];
        match self.anchor {
            AnchorConfig::Receiver { volts, phase_deg } => {
                lines.push("anchor.kind = receiver".to_string());
                lines.push(format!("anchor.voltage = {}", fmt_f64(volts)));
                lines.push(format!("anchor.phase_deg = {}", fmt_f64(phase_deg)));
            }
            AnchorConfig::TransmitterMagnitude { volts } => {
                lines.push("anchor.kind = transmitter".to_string());
                lines.push(format!("anchor.voltage = {}", fmt_f64(volts)));
            }
        }
        lines.push(format!("anchor.phi_rad = {}", fmt_f64(self.phi_rad)));
        if !self.validate_generations.is_empty() {
            lines.push(format!(
                "validate.generations = {}",
                self.validate_generations
                    .iter()
                    .map(|n| n.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            ));
        }
        if !self.damage_entries.is_empty() {
            lines.push(format!(
                "damage.entries = {}",
                self.damage_entries
                    .iter()
                    .map(|e| format!("{}:{}", e.component, fmt_f64(e.amount)))
                    .collect::<Vec<_>>()
                    .join(",")
            ));
        }
        if let Some(ballast) = &self.ballast {
            lines.push(format!(
                "ballast.span = {},{}",
                ballast.span.0, ballast.span.1
            ));
            lines.push(format!("ballast.rb_min = {}", fmt_f64(ballast.rb_min)));
            lines.push(format!("ballast.c_max = {}", fmt_f64(ballast.c_max)));
            if let Some(factors) = &ballast.rb_factors {
                lines.push(format!("ballast.rb_factors = {}", fmt_float_list(factors)));
            }
            if let Some(factors) = &ballast.c_factors {
                lines.push(format!("ballast.c_factors = {}", fmt_float_list(factors)));
            }
        }
        if let Some(train) = &self.train {
            lines.push(format!("train.wheelbase_count = {}", train.wheelbase_count));
            lines.push(format!(
                "train.wheelbase_spacing_m = {}",
                fmt_f64(train.wheelbase_spacing_m)
            ));
            lines.push(format!(
                "train.wheel_resistance_ohm = {}",
                fmt_f64(train.wheel_resistance_ohm)
            ));
            lines.push(format!(
                "train.speed_m_per_s = {}",
                fmt_f64(train.speed_m_per_s)
            ));
            lines.push(format!(
                "train.entry = {}",
                match train.entry {
                    LineEnd::Receiver => "receiver",
                    LineEnd::Transmitter => "transmitter",
                }
            ));
        }
        if let Some(sweep) = &self.sweep {
            lines.push(format!("sweep.start_hz = {}", fmt_f64(sweep.start_hz)));
            lines.push(format!("sweep.stop_hz = {}", fmt_f64(sweep.stop_hz)));
            lines.push(format!("sweep.points = {}", sweep.points));
        }
        lines
    }
}
