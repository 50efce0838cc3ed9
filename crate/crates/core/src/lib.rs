//! Steady-state voltage/current simulation of lumped RLGC ladder networks
//! approximating (possibly damaged) transmission lines, with railway
//! track-circuit scenario generators and a brute-force nodal-analysis
//! verification oracle.

pub mod analytic;
pub mod error;
pub mod ladder;
pub mod oracle;
pub mod scenarios;

pub use analytic::{
    analytic_profile, characteristic_impedance, propagation_constant, reflection_coefficient,
    time_domain_sample, AnalyticConstants, BoundaryCondition, LineParams, PhasorSample,
};
pub use error::{Error, Result};
pub use ladder::{
    frequency_response, node_phasors, Anchor, ComponentId, ComponentKind, DamageCase, DamageEntry,
    GenerationConstants, LineProfile, NetworkSpec, NodePhasors, NodeResponse, UndamagedConstants,
};
pub use scenarios::{
    ballast_damage, train_timeline, wheel_shunt_factor, BallastProfile, LineEnd, TimelineEntry,
    TrainSpec,
};
