//! Closed-form steady-state solution of a uniform transmission line.
//!
//! A line with per-unit-length series impedance `R + jωL` and shunt
//! admittance `G + jωC` carries voltage and current phasors
//!
//! ```text
//! v(x) = v(0)/(1+μ) · (e^{γx} + μ e^{-γx})
//! i(x) = i(0)/(1-μ) · (e^{γx} - μ e^{-γx})
//! ```
//!
//! where `γ` is the propagation constant, `μ` the reflection coefficient of
//! the load `Z0` attached at `x = 0`, and `x` grows from the receiver end
//! toward the transmitter. The physical signal is `Re{v(x)·e^{j(ωt+φ)}}`,
//! so the phasor magnitude is the peak of the sinusoid.
//!
//! This module is the reference the lumped ladder model is validated
//! against when the line is uniform.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Per-unit-length electrical attributes of the continuous line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineParams {
    /// Series resistance (Ω/m).
    pub r_per_m: f64,
    /// Series inductance (H/m).
    pub l_per_m: f64,
    /// Shunt conductance (S/m).
    pub g_per_m: f64,
    /// Shunt capacitance (F/m).
    pub c_per_m: f64,
}

impl LineParams {
    pub fn new(r_per_m: f64, l_per_m: f64, g_per_m: f64, c_per_m: f64) -> Result<Self> {
        let params = Self {
            r_per_m,
            l_per_m,
            g_per_m,
            c_per_m,
        };
        params.validate()?;
        Ok(params)
    }

    /// Checks non-negativity and that the line is non-degenerate: at least
    /// one series term and one shunt term must be positive, otherwise the
    /// propagation constant is identically zero.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.r_per_m, "series resistance"),
            (self.l_per_m, "series inductance"),
            (self.g_per_m, "shunt conductance"),
            (self.c_per_m, "shunt capacitance"),
        ];
        for (value, name) in fields {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and non-negative, got {value}"
                )));
            }
        }
        if self.r_per_m == 0.0 && self.l_per_m == 0.0 {
            return Err(Error::InvalidInput(
                "degenerate line: series resistance and inductance are both zero".into(),
            ));
        }
        if self.g_per_m == 0.0 && self.c_per_m == 0.0 {
            return Err(Error::InvalidInput(
                "degenerate line: shunt conductance and capacitance are both zero".into(),
            ));
        }
        Ok(())
    }

    /// `R + jωL` (Ω/m).
    pub fn series_impedance_per_m(&self, omega: f64) -> Complex64 {
        Complex64::new(self.r_per_m, omega * self.l_per_m)
    }

    /// `G + jωC` (S/m).
    pub fn shunt_admittance_per_m(&self, omega: f64) -> Complex64 {
        Complex64::new(self.g_per_m, omega * self.c_per_m)
    }
}

/// Derived frequency-domain constants of a terminated uniform line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticConstants {
    /// Propagation constant γ (1/m), principal branch.
    pub gamma: Complex64,
    /// Characteristic impedance Zc (Ω), principal branch.
    pub z_char: Complex64,
    /// Reflection coefficient μ of the attached load.
    pub mu: Complex64,
    /// Angular frequency ω (rad/s).
    pub omega: f64,
}

impl AnalyticConstants {
    /// Derives γ, Zc, and μ for a line terminated by `z_load` at `x = 0`.
    pub fn derive(params: &LineParams, omega: f64, z_load: Complex64) -> Result<Self> {
        let gamma = propagation_constant(params, omega)?;
        let z_char = characteristic_impedance(params, omega)?;
        let mu = reflection_coefficient(z_load, z_char)?;
        Ok(Self {
            gamma,
            z_char,
            mu,
            omega,
        })
    }
}

/// Receiver-end boundary condition anchoring the profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    /// Voltage phasor at `x = 0` (V).
    pub v0: Complex64,
    /// Load impedance at `x = 0` (Ω).
    pub z0: Complex64,
    /// Angular frequency ω (rad/s).
    pub omega: f64,
    /// Reference phase offset φ (rad) of the `e^{j(ωt+φ)}` carrier.
    pub phi: f64,
}

impl BoundaryCondition {
    /// Implied current phasor at `x = 0`.
    pub fn i0(&self) -> Complex64 {
        self.v0 / self.z0
    }
}

/// Voltage and current phasors at one position along the line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasorSample {
    /// Distance from the receiver end (m).
    pub x: f64,
    pub voltage: Complex64,
    pub current: Complex64,
}

impl PhasorSample {
    /// Peak of the voltage sinusoid, `max_t |v(x,t)|`.
    pub fn voltage_peak(&self) -> f64 {
        self.voltage.norm()
    }

    /// Peak of the current sinusoid, `max_t |i(x,t)|`.
    pub fn current_peak(&self) -> f64 {
        self.current.norm()
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !omega.is_finite() || omega <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "angular frequency must be finite and positive, got {omega}"
        )));
    }
    Ok(())
}

/// Propagation constant `γ = √((R+jωL)(G+jωC))`, principal branch
/// (non-negative real part).
pub fn propagation_constant(params: &LineParams, omega: f64) -> Result<Complex64> {
    params.validate()?;
    check_omega(omega)?;
    let product = params.series_impedance_per_m(omega) * params.shunt_admittance_per_m(omega);
    Ok(product.sqrt())
}

/// Characteristic impedance `Zc = √((R+jωL)/(G+jωC))`, principal branch.
pub fn characteristic_impedance(params: &LineParams, omega: f64) -> Result<Complex64> {
    params.validate()?;
    check_omega(omega)?;
    let ratio = params.series_impedance_per_m(omega) / params.shunt_admittance_per_m(omega);
    Ok(ratio.sqrt())
}

/// Reflection coefficient `μ = (Z0 - Zc)/(Z0 + Zc)` of a load `Z0`.
pub fn reflection_coefficient(z_load: Complex64, z_char: Complex64) -> Result<Complex64> {
    let denom = z_load + z_char;
    if denom == Complex64::ZERO {
        return Err(Error::SingularConfiguration(
            "load and characteristic impedance cancel (Z0 + Zc = 0)",
        ));
    }
    Ok((z_load - z_char) / denom)
}

/// Evaluates the voltage/current phasors at the given positions.
///
/// Positions are distances from the receiver end and must be finite and
/// non-negative. The returned samples reproduce `(v0, v0/Z0)` exactly at
/// `x = 0`.
pub fn analytic_profile(
    params: &LineParams,
    boundary: &BoundaryCondition,
    positions: &[f64],
) -> Result<Vec<PhasorSample>> {
    let constants = AnalyticConstants::derive(params, boundary.omega, boundary.z0)?;
    let one_plus_mu = Complex64::ONE + constants.mu;
    let one_minus_mu = Complex64::ONE - constants.mu;
    if one_plus_mu == Complex64::ZERO {
        return Err(Error::SingularConfiguration(
            "short-circuit load (μ = -1): voltage profile undefined",
        ));
    }
    if one_minus_mu == Complex64::ZERO {
        return Err(Error::SingularConfiguration(
            "open-circuit load (μ = 1): current profile undefined",
        ));
    }
    let i0 = boundary.i0();
    let mut samples = Vec::with_capacity(positions.len());
    for &x in positions {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidInput(format!(
                "position must be finite and non-negative, got {x}"
            )));
        }
        let forward = (constants.gamma * x).exp();
        let backward = (-constants.gamma * x).exp();
        let voltage = boundary.v0 * ((forward + constants.mu * backward) / one_plus_mu);
        let current = i0 * ((forward - constants.mu * backward) / one_minus_mu);
        samples.push(PhasorSample {
            x,
            voltage,
            current,
        });
    }
    Ok(samples)
}

/// Instantaneous value `Re{phasor · e^{j(ωt+φ)}}` of the physical signal.
pub fn time_domain_sample(phasor: Complex64, omega: f64, phi: f64, t: f64) -> f64 {
    (phasor * Complex64::from_polar(1.0, omega * t + phi)).re
}
