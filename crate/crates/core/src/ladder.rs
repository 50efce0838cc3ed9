//! Lumped RLGC ladder network model with per-component damage.
//!
//! The continuous line is discretized into `n` generations. Each generation
//! carries a series resistor/inductor pair on both rails followed by one
//! shunt resistor and one shunt capacitor to the opposite rail; the load
//! `z_out` terminates the last generation. Node `g` is the junction after
//! `g` generations counted from the transmitter, so node 0 is the
//! transmitter and node `n` the receiver. The distance coordinate runs the
//! other way: `x(g) = (n - g)·Δx`, with `x = 0` at the receiver.
//!
//! A damage case perturbs individual components multiplicatively. The
//! impedance `Z_g = V_g/I_g` and voltage gain `H_g = V_out/V_g` at every
//! node follow from a single receiver-to-transmitter sweep: starting from
//! `(z_out, 1)` at the receiver, each generation folds in as
//!
//! ```text
//! Z(s) = r₁ + r₂ + (l₁ + l₂)s + 1/(1/rb + c·s + 1/Z_sub(s))
//! H(s) = H_sub(s) · (1 - (r₁ + r₂ + (l₁ + l₂)s) / Z(s))
//! ```
//!
//! The sweep evaluates the same expressions in the same order as the
//! equivalent recursion over subnetworks, without a recursion-depth limit,
//! and keeps every intermediate pair. Once one voltage is known the pairs
//! turn into absolute phasors at every node.

use num_complex::Complex64;

use crate::analytic::LineParams;
use crate::error::{Error, Result};

/// Effective component values of a single undamaged generation.
///
/// `series_r`/`series_l` apply to each rail separately, so the loop series
/// impedance of one generation is `2·series_r + 2·series_l·s`. A missing
/// `shunt_r` models a line without leakage (`G = 0`): the shunt branch then
/// contributes only the capacitive admittance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UndamagedConstants {
    /// Series resistance per rail per generation (Ω).
    pub series_r: f64,
    /// Series inductance per rail per generation (H).
    pub series_l: f64,
    /// Shunt resistance per generation (Ω); `None` when there is no
    /// leakage path.
    pub shunt_r: Option<f64>,
    /// Shunt capacitance per generation (F).
    pub shunt_c: f64,
}

impl UndamagedConstants {
    /// Lumps per-unit-length line attributes into one generation of
    /// length `dx`: `r = R·dx/2`, `l = L·dx/2`, `rb = 1/(G·dx)`,
    /// `c = C·dx`.
    pub fn from_line(params: &LineParams, dx: f64) -> Result<Self> {
        params.validate()?;
        if !dx.is_finite() || dx <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "segment length must be finite and positive, got {dx}"
            )));
        }
        let shunt_r = if params.g_per_m == 0.0 {
            None
        } else {
            Some(1.0 / (params.g_per_m * dx))
        };
        Ok(Self {
            series_r: params.r_per_m * dx / 2.0,
            series_l: params.l_per_m * dx / 2.0,
            shunt_r,
            shunt_c: params.c_per_m * dx,
        })
    }

    fn validate(&self) -> Result<()> {
        for (value, name) in [
            (self.series_r, "series resistance"),
            (self.series_l, "series inductance"),
            (self.shunt_c, "shunt capacitance"),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if let Some(rb) = self.shunt_r {
            if !rb.is_finite() || rb <= 0.0 {
                return Err(Error::InvalidInput(format!(
                    "shunt resistance must be finite and positive, got {rb}"
                )));
            }
        }
        Ok(())
    }
}

/// Discretized ladder description: generation count, segment length,
/// undamaged constants, termination, and operating frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkSpec {
    /// Number of generations `n ≥ 1`.
    pub generations: usize,
    /// Segment length Δx (m).
    pub dx: f64,
    /// Undamaged per-generation component values.
    pub constants: UndamagedConstants,
    /// Terminating impedance at the receiver end (Ω).
    pub z_out: Complex64,
    /// Angular frequency ω (rad/s).
    pub omega: f64,
}

impl NetworkSpec {
    /// Builds the `n`-generation ladder approximating a line of the given
    /// total length.
    pub fn from_line(
        params: &LineParams,
        length: f64,
        generations: usize,
        omega: f64,
        z_out: Complex64,
    ) -> Result<Self> {
        if generations == 0 {
            return Err(Error::InvalidInput(
                "generation count must be at least 1".into(),
            ));
        }
        if !length.is_finite() || length <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "line length must be finite and positive, got {length}"
            )));
        }
        let dx = length / generations as f64;
        let spec = Self {
            generations,
            dx,
            constants: UndamagedConstants::from_line(params, dx)?,
            z_out,
            omega,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.generations == 0 {
            return Err(Error::InvalidInput(
                "generation count must be at least 1".into(),
            ));
        }
        if !self.dx.is_finite() || self.dx <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "segment length must be finite and positive, got {}",
                self.dx
            )));
        }
        if !self.omega.is_finite() || self.omega <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "angular frequency must be finite and positive, got {}",
                self.omega
            )));
        }
        if !self.z_out.re.is_finite() || !self.z_out.im.is_finite() {
            return Err(Error::InvalidInput(
                "terminating impedance must be finite".into(),
            ));
        }
        self.constants.validate()
    }

    /// Total line length `n·Δx` (m).
    pub fn length(&self) -> f64 {
        self.generations as f64 * self.dx
    }

    /// Laplace variable `s = jω` of the operating point.
    pub fn laplace_s(&self) -> Complex64 {
        Complex64::new(0.0, self.omega)
    }

    /// Distance of node `g` from the receiver end: `x(g) = (n - g)·Δx`.
    pub fn node_x(&self, node: usize) -> f64 {
        (self.generations - node) as f64 * self.dx
    }
}

/// The six damageable components of one generation. `SeriesR`/`SeriesL`
/// live on the top or bottom rail; `ShuntR`/`ShuntC` bridge the rails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    SeriesRTop,
    SeriesRBottom,
    SeriesLTop,
    SeriesLBottom,
    ShuntR,
    ShuntC,
}

impl ComponentKind {
    pub const ALL: [ComponentKind; 6] = [
        ComponentKind::SeriesRTop,
        ComponentKind::SeriesRBottom,
        ComponentKind::SeriesLTop,
        ComponentKind::SeriesLBottom,
        ComponentKind::ShuntR,
        ComponentKind::ShuntC,
    ];

    /// Short label used in configuration files and diagnostics.
    pub fn label(&self) -> &'static str {
        match self {
            ComponentKind::SeriesRTop => "r1",
            ComponentKind::SeriesRBottom => "r2",
            ComponentKind::SeriesLTop => "l1",
            ComponentKind::SeriesLBottom => "l2",
            ComponentKind::ShuntR => "rb",
            ComponentKind::ShuntC => "c",
        }
    }
}

/// One damageable component: a kind plus its 1-based generation index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ComponentId {
    pub generation: usize,
    pub kind: ComponentKind,
}

impl ComponentId {
    pub fn new(generation: usize, kind: ComponentKind) -> Self {
        Self { generation, kind }
    }
}

impl std::fmt::Display for ComponentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}_{}", self.kind.label(), self.generation)
    }
}

/// A component together with its multiplicative damage amount.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DamageEntry {
    pub component: ComponentId,
    pub amount: f64,
}

/// An ordered list of damaged components with multiplicative amounts.
/// Amounts apply to the component's natural unit (Ω, H, F), so an amount
/// of 0.1 on a shunt resistor means ten times more leakage. The empty case
/// is the undamaged network.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DamageCase {
    entries: Vec<DamageEntry>,
}

impl DamageCase {
    /// Validates and wraps a list of entries: amounts must be positive and
    /// finite, generation indices 1-based, and no component may appear
    /// twice.
    pub fn new(entries: Vec<DamageEntry>) -> Result<Self> {
        for entry in &entries {
            if !entry.amount.is_finite() || entry.amount <= 0.0 {
                return Err(Error::InvalidDamage(format!(
                    "amount for {} must be finite and positive, got {}",
                    entry.component, entry.amount
                )));
            }
            if entry.component.generation == 0 {
                return Err(Error::InvalidDamage(format!(
                    "generation index for {} must be at least 1",
                    entry.component.kind.label()
                )));
            }
        }
        for (i, entry) in entries.iter().enumerate() {
            if entries[..i].iter().any(|e| e.component == entry.component) {
                return Err(Error::InvalidDamage(format!(
                    "duplicate component {}",
                    entry.component
                )));
            }
        }
        Ok(Self { entries })
    }

    /// The undamaged network.
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn entries(&self) -> &[DamageEntry] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Checks every generation index against a network with `generations`
    /// generations.
    pub fn validate_for(&self, generations: usize) -> Result<()> {
        for entry in &self.entries {
            if entry.component.generation > generations {
                return Err(Error::InvalidDamage(format!(
                    "component {} is outside the {generations}-generation network",
                    entry.component
                )));
            }
        }
        Ok(())
    }

    fn amount_for(&self, generation: usize, kind: ComponentKind) -> f64 {
        self.entries
            .iter()
            .find(|e| e.component.generation == generation && e.component.kind == kind)
            .map_or(1.0, |e| e.amount)
    }
}

/// Splits a damage case into the generation-1 part and the remainder,
/// reindexed for the subnetwork that starts at generation 2.
pub fn partition(damage: &DamageCase) -> (DamageCase, DamageCase) {
    let mut first = Vec::new();
    let mut rest = Vec::new();
    for entry in damage.entries() {
        if entry.component.generation == 1 {
            first.push(*entry);
        } else {
            rest.push(DamageEntry {
                component: ComponentId::new(entry.component.generation - 1, entry.component.kind),
                amount: entry.amount,
            });
        }
    }
    // Entries were valid and the index shift cannot create duplicates.
    (DamageCase { entries: first }, DamageCase { entries: rest })
}

/// Effective (post-damage) component values of one generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationConstants {
    /// Top-rail series resistance (Ω).
    pub r1: f64,
    /// Bottom-rail series resistance (Ω).
    pub r2: f64,
    /// Top-rail series inductance (H).
    pub l1: f64,
    /// Bottom-rail series inductance (H).
    pub l2: f64,
    /// Shunt resistance (Ω); `None` when there is no leakage path.
    pub shunt_r: Option<f64>,
    /// Shunt capacitance (F).
    pub shunt_c: f64,
}

impl GenerationConstants {
    /// Shunt admittance `1/rb + c·s` of this generation.
    pub fn shunt_admittance(&self, s: Complex64) -> Complex64 {
        let leak = self.shunt_r.map_or(0.0, |rb| 1.0 / rb);
        Complex64::new(leak, 0.0) + self.shunt_c * s
    }
}

/// Applies the damage amounts for generation `g` to the undamaged
/// constants. Components without a damage entry keep their undamaged
/// value, so the empty case reproduces `UndamagedConstants` exactly.
pub fn generation_constants(
    spec: &NetworkSpec,
    damage: &DamageCase,
    generation: usize,
) -> GenerationConstants {
    let und = &spec.constants;
    GenerationConstants {
        r1: und.series_r * damage.amount_for(generation, ComponentKind::SeriesRTop),
        r2: und.series_r * damage.amount_for(generation, ComponentKind::SeriesRBottom),
        l1: und.series_l * damage.amount_for(generation, ComponentKind::SeriesLTop),
        l2: und.series_l * damage.amount_for(generation, ComponentKind::SeriesLBottom),
        shunt_r: und
            .shunt_r
            .map(|rb| rb * damage.amount_for(generation, ComponentKind::ShuntR)),
        shunt_c: und.shunt_c * damage.amount_for(generation, ComponentKind::ShuntC),
    }
}

/// Loop series impedance of one generation: `r₁ + r₂ + (l₁ + l₂)s`.
pub fn series_branch(gc: &GenerationConstants, s: Complex64) -> Complex64 {
    Complex64::new(gc.r1 + gc.r2, 0.0) + (gc.l1 + gc.l2) * s
}

/// Input impedance of one generation terminated by a subnetwork of
/// impedance `z_sub`:
/// `Z = r₁ + r₂ + (l₁ + l₂)s + 1/(1/rb + c·s + 1/z_sub)`.
pub fn step_impedance(
    gc: &GenerationConstants,
    z_sub: Complex64,
    s: Complex64,
) -> Result<Complex64> {
    if z_sub == Complex64::ZERO {
        return Err(Error::SingularStep("subnetwork impedance is zero"));
    }
    let admittance = gc.shunt_admittance(s) + 1.0 / z_sub;
    if admittance == Complex64::ZERO {
        return Err(Error::SingularStep("shunt admittance sums to zero"));
    }
    Ok(series_branch(gc, s) + 1.0 / admittance)
}

/// Voltage gain across one generation, given the generation's input
/// impedance `z` and the subnetwork gain `h_sub`:
/// `H = h_sub · (1 - (r₁ + r₂ + (l₁ + l₂)s)/z)`.
pub fn step_gain(
    gc: &GenerationConstants,
    z: Complex64,
    h_sub: Complex64,
    s: Complex64,
) -> Result<Complex64> {
    if z == Complex64::ZERO {
        return Err(Error::SingularStep("generation input impedance is zero"));
    }
    Ok(h_sub * (Complex64::ONE - series_branch(gc, s) / z))
}

/// Impedance and voltage gain at one node, looking toward the receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeResponse {
    /// `Z_g = V_g / I_g` (Ω).
    pub impedance: Complex64,
    /// `H_g = V_out / V_g` (dimensionless).
    pub gain: Complex64,
}

/// Computes `(Z_g, H_g)` at every node, ordered from the transmitter
/// (node 0) to the receiver (node n).
///
/// The receiver node is the base case `(z_out, 1)`; each preceding node
/// folds in one generation via [`step_impedance`] and [`step_gain`].
pub fn frequency_response(spec: &NetworkSpec, damage: &DamageCase) -> Result<Vec<NodeResponse>> {
    spec.validate()?;
    damage.validate_for(spec.generations)?;
    let s = spec.laplace_s();
    let n = spec.generations;
    let mut responses = Vec::with_capacity(n + 1);
    let mut z = spec.z_out;
    let mut h = Complex64::ONE;
    responses.push(NodeResponse {
        impedance: z,
        gain: h,
    });
    for generation in (1..=n).rev() {
        let gc = generation_constants(spec, damage, generation);
        z = step_impedance(&gc, z, s).map_err(|e| at_generation(e, generation))?;
        h = step_gain(&gc, z, h, s).map_err(|e| at_generation(e, generation))?;
        responses.push(NodeResponse {
            impedance: z,
            gain: h,
        });
    }
    responses.reverse();
    Ok(responses)
}

fn at_generation(error: Error, generation: usize) -> Error {
    match error {
        Error::SingularStep(reason) => Error::SingularNetwork { generation, reason },
        other => other,
    }
}

/// Boundary quantity held fixed when recovering absolute node phasors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anchor {
    /// The receiver voltage phasor `v_out` is known.
    ReceiverVoltage(Complex64),
    /// The transmitter voltage peak `|v_in|` is known; the transmitter
    /// node is assigned zero phase. Only magnitudes are meaningful under
    /// this anchor.
    TransmitterVoltageMagnitude(f64),
}

/// Absolute phasors at one ladder node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePhasors {
    /// Node index `g` in `0..=n`, counted from the transmitter.
    pub node: usize,
    /// Distance from the receiver end (m).
    pub x: f64,
    pub voltage: Complex64,
    pub current: Complex64,
}

impl NodePhasors {
    /// Peak of the voltage sinusoid, `max_t |v(t)|`.
    pub fn voltage_peak(&self) -> f64 {
        self.voltage.norm()
    }

    /// Peak of the current sinusoid, `max_t |i(t)|`.
    pub fn current_peak(&self) -> f64 {
        self.current.norm()
    }
}

/// Voltage/current phasors at every node, from transmitter to receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct LineProfile {
    pub nodes: Vec<NodePhasors>,
}

impl LineProfile {
    /// Phasors at the receiver node `n`.
    pub fn receiver(&self) -> &NodePhasors {
        self.nodes.last().expect("profile has at least two nodes")
    }

    /// Phasors at the transmitter node 0.
    pub fn transmitter(&self) -> &NodePhasors {
        self.nodes.first().expect("profile has at least two nodes")
    }
}

/// Converts per-node responses into absolute phasors: `V_g = v_out / H_g`
/// and `I_g = V_g / Z_g`, with `v_out` taken from the anchor.
pub fn node_phasors(
    responses: &[NodeResponse],
    spec: &NetworkSpec,
    anchor: &Anchor,
) -> Result<LineProfile> {
    if responses.len() != spec.generations + 1 {
        return Err(Error::InvalidInput(format!(
            "expected {} node responses for {} generations, got {}",
            spec.generations + 1,
            spec.generations,
            responses.len()
        )));
    }
    let v_out = match anchor {
        Anchor::ReceiverVoltage(v) => *v,
        Anchor::TransmitterVoltageMagnitude(magnitude) => {
            if !magnitude.is_finite() || *magnitude < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "transmitter voltage magnitude must be finite and non-negative, got {magnitude}"
                )));
            }
            // V_0 = v_out / H_0 = |v_in| with zero phase at the transmitter.
            Complex64::new(*magnitude, 0.0) * responses[0].gain
        }
    };
    let mut nodes = Vec::with_capacity(responses.len());
    for (g, response) in responses.iter().enumerate() {
        if response.gain == Complex64::ZERO {
            return Err(Error::SingularGain { node: g });
        }
        if response.impedance == Complex64::ZERO {
            return Err(Error::SingularImpedance { node: g });
        }
        let voltage = v_out / response.gain;
        let current = voltage / response.impedance;
        nodes.push(NodePhasors {
            node: g,
            x: spec.node_x(g),
            voltage,
            current,
        });
    }
    Ok(LineProfile { nodes })
}
