//! Damage-case generators for railway track-circuit studies.
//!
//! Two situations are covered: static ballast degradation over a span of
//! subsections (lowered shunt resistance, raised shunt capacitance), and a
//! train traversing the track, where each wheelset shunts the rails and is
//! equivalent to a time series of shunt-resistance damage cases.

use crate::error::{Error, Result};
use crate::ladder::{ComponentId, ComponentKind, DamageCase, DamageEntry, NetworkSpec};

/// Multiplicative shunt-resistance factors over a contiguous generation
/// span, one `rb` factor and one `c` factor per generation.
#[derive(Debug, Clone, PartialEq)]
pub struct BallastProfile {
    span_lo: usize,
    span_hi: usize,
    rb_factors: Vec<f64>,
    c_factors: Vec<f64>,
}

impl BallastProfile {
    /// Wraps explicit factor lists. Both lists must cover the span
    /// exactly; factors must be positive and finite.
    pub fn new(span: (usize, usize), rb_factors: Vec<f64>, c_factors: Vec<f64>) -> Result<Self> {
        let (span_lo, span_hi) = span;
        if span_lo == 0 || span_lo > span_hi {
            return Err(Error::InvalidInput(format!(
                "ballast span must satisfy 1 <= lo <= hi, got [{span_lo}, {span_hi}]"
            )));
        }
        let len = span_hi - span_lo + 1;
        if rb_factors.len() != len || c_factors.len() != len {
            return Err(Error::InvalidInput(format!(
                "ballast span [{span_lo}, {span_hi}] needs {len} factors per list, got {} rb and {} c",
                rb_factors.len(),
                c_factors.len()
            )));
        }
        for &f in rb_factors.iter().chain(c_factors.iter()) {
            if !f.is_finite() || f <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "ballast factors must be finite and positive, got {f}"
                )));
            }
        }
        Ok(Self {
            span_lo,
            span_hi,
            rb_factors,
            c_factors,
        })
    }

    /// Smooth symmetric degradation: `rb` factors dip from 1 at the span
    /// edges to `rb_min` at the center, `c` factors mirror the dip upward
    /// to `c_max`, both on a raised-cosine weight.
    pub fn smooth(span: (usize, usize), rb_min: f64, c_max: f64) -> Result<Self> {
        if !rb_min.is_finite() || rb_min <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "rb_min must be finite and positive, got {rb_min}"
            )));
        }
        if !c_max.is_finite() || c_max <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "c_max must be finite and positive, got {c_max}"
            )));
        }
        let (lo, hi) = span;
        if lo == 0 || lo > hi {
            return Err(Error::InvalidInput(format!(
                "ballast span must satisfy 1 <= lo <= hi, got [{lo}, {hi}]"
            )));
        }
        let len = hi - lo + 1;
        let weight = |k: usize| -> f64 {
            if len == 1 {
                return 1.0;
            }
            let u = k as f64 / (len - 1) as f64;
            (1.0 - (2.0 * std::f64::consts::PI * u).cos()) / 2.0
        };
        let rb_factors = (0..len).map(|k| 1.0 - (1.0 - rb_min) * weight(k)).collect();
        let c_factors = (0..len).map(|k| 1.0 + (c_max - 1.0) * weight(k)).collect();
        Self::new(span, rb_factors, c_factors)
    }

    pub fn span(&self) -> (usize, usize) {
        (self.span_lo, self.span_hi)
    }

    pub fn rb_factors(&self) -> &[f64] {
        &self.rb_factors
    }

    pub fn c_factors(&self) -> &[f64] {
        &self.c_factors
    }

    /// Degradation normally lowers `rb` and raises `c`. Factors pointing
    /// the other way are legal (they describe a different physical
    /// situation), so they produce warnings rather than errors.
    pub fn direction_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if self.rb_factors.iter().any(|&f| f > 1.0) {
            warnings.push(
                "ballast rb factors above 1 increase shunt resistance; degradation lowers it"
                    .to_string(),
            );
        }
        if self.c_factors.iter().any(|&f| f < 1.0) {
            warnings.push(
                "ballast c factors below 1 decrease shunt capacitance; degradation raises it"
                    .to_string(),
            );
        }
        warnings
    }
}

/// Expands a ballast profile into a damage case: all shunt-resistance
/// entries over the span in ascending generation order, then all
/// shunt-capacitance entries.
pub fn ballast_damage(profile: &BallastProfile) -> Result<DamageCase> {
    let (lo, hi) = profile.span();
    let mut entries = Vec::with_capacity(2 * (hi - lo + 1));
    for (k, g) in (lo..=hi).enumerate() {
        entries.push(DamageEntry {
            component: ComponentId::new(g, ComponentKind::ShuntR),
            amount: profile.rb_factors[k],
        });
    }
    for (k, g) in (lo..=hi).enumerate() {
        entries.push(DamageEntry {
            component: ComponentId::new(g, ComponentKind::ShuntC),
            amount: profile.c_factors[k],
        });
    }
    DamageCase::new(entries)
}

/// End of the line a train enters from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineEnd {
    Receiver,
    Transmitter,
}

/// A train described by its wheelsets: count, spacing, per-wheelset shunt
/// resistance, speed, and the end it enters from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainSpec {
    pub wheelbase_count: usize,
    /// Distance between consecutive wheelsets (m); must equal the network
    /// segment length, so each occupied subsection holds exactly one
    /// wheelset.
    pub wheelbase_spacing: f64,
    /// Rail-to-rail resistance of one wheelset (Ω).
    pub wheel_resistance: f64,
    /// Train speed (m/s).
    pub speed: f64,
    pub entry_end: LineEnd,
}

impl TrainSpec {
    fn validate(&self) -> Result<()> {
        if self.wheelbase_count == 0 {
            return Err(Error::InvalidInput(
                "train needs at least one wheelset".into(),
            ));
        }
        for (value, name) in [
            (self.wheelbase_spacing, "wheelbase spacing"),
            (self.wheel_resistance, "wheel resistance"),
            (self.speed, "train speed"),
        ] {
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and positive, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Multiplicative factor a wheelset applies to the shunt resistance of the
/// subsection it occupies: `parallel(rb, r_w)/rb = r_w/(rb + r_w)`.
pub fn wheel_shunt_factor(shunt_r: f64, wheel_r: f64) -> f64 {
    wheel_r / (shunt_r + wheel_r)
}

/// One step of a time-indexed damage sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct TimelineEntry {
    /// Time since the first wheelset entered the line (s).
    pub t: f64,
    pub damage: DamageCase,
}

/// Expands a train passage into per-step damage cases.
///
/// The train advances one subsection per step of `dx/speed` seconds. The
/// occupied window grows at the entry end, slides at full length, then
/// shrinks at the far end, for `n + wheelbases - 1` steps in total. Each
/// occupied subsection gets one shunt-resistance entry with the wheelset
/// factor; entries are ordered from the entry end (matching the direction
/// the train came from).
pub fn train_timeline(spec: &NetworkSpec, train: &TrainSpec) -> Result<Vec<TimelineEntry>> {
    spec.validate()?;
    train.validate()?;
    if train.wheelbase_spacing != spec.dx {
        return Err(Error::Unsupported(format!(
            "wheelbase spacing {} m must equal the segment length {} m; \
             fractional subsection occupancy is not modeled",
            train.wheelbase_spacing, spec.dx
        )));
    }
    let Some(rb) = spec.constants.shunt_r else {
        return Err(Error::Unsupported(
            "wheelset shunts scale the shunt resistance, which this network does not have \
             (no leakage path)"
                .into(),
        ));
    };
    if train.wheelbase_count > spec.generations {
        return Err(Error::Unsupported(format!(
            "train with {} wheelsets does not fit on a {}-generation network",
            train.wheelbase_count, spec.generations
        )));
    }
    let n = spec.generations;
    let wheels = train.wheelbase_count;
    let factor = wheel_shunt_factor(rb, train.wheel_resistance);
    let step_seconds = spec.dx / train.speed;
    let steps = n + wheels - 1;
    let mut timeline = Vec::with_capacity(steps);
    for k in 1..=steps {
        // Window of occupied generations at step k, expressed for a train
        // entering at the receiver end (generation n); mirrored below for
        // transmitter entry.
        let lo = (n + 1).saturating_sub(k).max(1);
        let hi = (n + wheels - k).min(n);
        let window: Vec<usize> = match train.entry_end {
            // Entries ordered from the entry end toward the far end.
            LineEnd::Receiver => (lo..=hi).rev().collect(),
            LineEnd::Transmitter => (lo..=hi).map(|g| n + 1 - g).collect(),
        };
        let entries = window
            .into_iter()
            .map(|g| DamageEntry {
                component: ComponentId::new(g, ComponentKind::ShuntR),
                amount: factor,
            })
            .collect();
        timeline.push(TimelineEntry {
            t: k as f64 * step_seconds,
            damage: DamageCase::new(entries)?,
        });
    }
    Ok(timeline)
}
