//! Brute-force verification of the ladder sweep by full nodal analysis.
//!
//! The exact ladder circuit is assembled as a complex linear system with
//! node voltages and series branch currents as unknowns, driven by a unit
//! voltage source at the transmitter, and solved by dense LU with partial
//! pivoting plus one step of iterative refinement. Per-node impedance and
//! gain extracted from the solution are computed without touching the
//! recursion, which is the point: the two paths agree only if both are
//! right.
//!
//! Two assemblies are provided. [`nodal_solve`] collapses the two rails
//! into a single series impedance per generation, matching how the sweep
//! treats them. [`nodal_solve_two_rail`] keeps both rails as separate
//! nodes; for this topology the collapse is exact, and a test pins that.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::ladder::{generation_constants, series_branch, DamageCase, NetworkSpec, NodeResponse};

/// Solution of the assembled circuit under a 1 V transmitter source.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution {
    /// Rail-to-rail voltage at nodes `0..=n`; entry 0 is the 1 V source.
    pub node_voltages: Vec<Complex64>,
    /// Current flowing from node `g` toward the receiver: entries
    /// `0..n` are the series-branch currents of generations `1..=n`,
    /// entry `n` is the load current.
    pub branch_currents: Vec<Complex64>,
    /// Relative ∞-norm residual `‖Ax - b‖/‖b‖` of the solved system.
    pub residual: f64,
}

/// Dense complex LU solve with partial pivoting and one refinement pass.
/// `a` is row-major `n×n` and is consumed by the factorization.
fn solve_dense(mut a: Vec<Complex64>, b: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    let a_orig = a.clone();
    let mut pivots = vec![0usize; n];

    for k in 0..n {
        let mut max_row = k;
        let mut max_val = a[k * n + k].norm();
        for i in (k + 1)..n {
            let val = a[i * n + k].norm();
            if val > max_val {
                max_val = val;
                max_row = i;
            }
        }
        if max_val == 0.0 {
            return Err(Error::SingularSystem { row: k });
        }
        pivots[k] = max_row;
        if max_row != k {
            for j in 0..n {
                a.swap(k * n + j, max_row * n + j);
            }
        }
        let pivot = a[k * n + k];
        for i in (k + 1)..n {
            let factor = a[i * n + k] / pivot;
            a[i * n + k] = factor;
            for j in (k + 1)..n {
                let a_kj = a[k * n + j];
                a[i * n + j] -= factor * a_kj;
            }
        }
    }

    let lu_solve = |a: &[Complex64], pivots: &[usize], rhs: &[Complex64]| {
        let mut x = rhs.to_vec();
        // Rows of L were swapped during factorization, so the whole
        // permutation applies to the right-hand side up front.
        for (k, &pivot_row) in pivots.iter().enumerate() {
            x.swap(k, pivot_row);
        }
        for k in 0..n {
            for i in (k + 1)..n {
                let xk = x[k];
                x[i] -= a[i * n + k] * xk;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let xj = x[j];
                x[i] -= a[i * n + j] * xj;
            }
            x[i] /= a[i * n + i];
        }
        x
    };

    let residual_of = |x: &[Complex64]| {
        let mut r = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = b[i];
            for j in 0..n {
                acc -= a_orig[i * n + j] * x[j];
            }
            r[i] = acc;
        }
        r
    };

    let mut x = lu_solve(&a, &pivots, b);
    // One refinement pass tightens the residual by a few digits.
    let r = residual_of(&x);
    let dx = lu_solve(&a, &pivots, &r);
    for i in 0..n {
        x[i] += dx[i];
    }

    let b_norm = b.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
    let r_norm = residual_of(&x)
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max);
    Ok((
        x,
        if b_norm > 0.0 {
            r_norm / b_norm
        } else {
            r_norm
        },
    ))
}

/// Solves the collapsed single-rail ladder under a unit transmitter
/// voltage.
///
/// Node voltages are the primary unknowns (admittance form keeps tiny
/// receiver-side voltages componentwise accurate even under extreme
/// attenuation), the load current is a branch unknown so a zero load
/// impedance stays representable, and any generation with zero series
/// impedance gets its own branch current plus an equal-voltage
/// constraint. Branch currents are recovered by summing shunt currents
/// from the receiver upward; differencing near-equal node voltages would
/// lose up to seven digits on weakly attenuating networks.
pub fn nodal_solve(spec: &NetworkSpec, damage: &DamageCase) -> Result<DenseSolution> {
    spec.validate()?;
    damage.validate_for(spec.generations)?;
    let n = spec.generations;
    let s = spec.laplace_s();

    let constants: Vec<_> = (1..=n)
        .map(|g| generation_constants(spec, damage, g))
        .collect();
    let z_series: Vec<Complex64> = constants.iter().map(|gc| series_branch(gc, s)).collect();
    let y_shunt: Vec<Complex64> = constants.iter().map(|gc| gc.shunt_admittance(s)).collect();

    // Extra branch-current unknowns for ideal-wire series branches.
    let wire_index: Vec<Option<usize>> = {
        let mut next = 0usize;
        z_series
            .iter()
            .map(|z| {
                if *z == Complex64::ZERO {
                    next += 1;
                    Some(n + 1 + next - 1)
                } else {
                    None
                }
            })
            .collect()
    };
    let wire_count = wire_index.iter().flatten().count();
    let dim = n + 1 + wire_count;
    let i_load = n;
    let mut a = vec![Complex64::ZERO; dim * dim];
    let mut b = vec![Complex64::ZERO; dim];
    let v = |g: usize| g - 1; // V_g, 1 <= g <= n

    // KCL row per node g: currents leaving node g sum to zero. V_0 = 1 is
    // the known source, so its couplings move to the right-hand side.
    for g in 1..=n {
        let row = g - 1;
        match wire_index[g - 1] {
            // Series branch of generation g (between nodes g-1 and g).
            None => {
                let y = 1.0 / z_series[g - 1];
                a[row * dim + v(g)] += y;
                if g > 1 {
                    a[row * dim + v(g - 1)] -= y;
                } else {
                    b[row] += y;
                }
            }
            Some(j) => {
                // Inflow through the ideal wire, plus the constraint
                // V_{g-1} = V_g as the wire's defining equation.
                a[row * dim + j] -= Complex64::ONE;
                let c_row = j;
                if g > 1 {
                    a[c_row * dim + v(g - 1)] = Complex64::ONE;
                } else {
                    b[c_row] = -Complex64::ONE;
                }
                a[c_row * dim + v(g)] = -Complex64::ONE;
            }
        }
        a[row * dim + v(g)] += y_shunt[g - 1];
        if g < n {
            // Series branch of generation g+1 leaving toward node g+1.
            match wire_index[g] {
                None => {
                    let y = 1.0 / z_series[g];
                    a[row * dim + v(g)] += y;
                    a[row * dim + v(g + 1)] -= y;
                }
                Some(j) => {
                    a[row * dim + j] += Complex64::ONE;
                }
            }
        } else {
            a[row * dim + i_load] += Complex64::ONE;
        }
    }
    // Load branch: V_n - zOut·I_load = 0.
    a[i_load * dim + v(n)] = Complex64::ONE;
    a[i_load * dim + i_load] = -spec.z_out;

    let (x, residual) = solve_dense(a, &b)?;
    let mut node_voltages = Vec::with_capacity(n + 1);
    node_voltages.push(Complex64::ONE);
    node_voltages.extend((1..=n).map(|g| x[v(g)]));

    // Telescoped currents: start at the load and add each shunt current
    // while walking toward the transmitter. A shorted load keeps the
    // solved branch current (V_n/zOut would be 0/0 there).
    let mut branch_currents = vec![Complex64::ZERO; n + 1];
    branch_currents[n] = if spec.z_out == Complex64::ZERO {
        x[i_load]
    } else {
        node_voltages[n] / spec.z_out
    };
    for g in (0..n).rev() {
        branch_currents[g] = branch_currents[g + 1] + y_shunt[g] * node_voltages[g + 1];
    }
    Ok(DenseSolution {
        node_voltages,
        branch_currents,
        residual,
    })
}

/// Solves the full two-rail ladder, keeping the top and bottom rails as
/// separate nodes with their own series elements and branch currents.
/// Node voltages in the returned solution are rail-to-rail differences,
/// comparable entry-for-entry with [`nodal_solve`].
pub fn nodal_solve_two_rail(spec: &NetworkSpec, damage: &DamageCase) -> Result<DenseSolution> {
    spec.validate()?;
    damage.validate_for(spec.generations)?;
    let n = spec.generations;
    let s = spec.laplace_s();
    let dim = 4 * n + 1;
    let mut a = vec![Complex64::ZERO; dim * dim];
    let mut b = vec![Complex64::ZERO; dim];
    // Unknown layout: T_1..T_n, B_1..B_n, IT_1..IT_n, IB_1..IB_n, I_load.
    // T_0 = 1 and B_0 = 0 are the source terminals.
    let t = |g: usize| g - 1;
    let bo = |g: usize| n + g - 1;
    let it = |g: usize| 2 * n + g - 1;
    let ib = |g: usize| 3 * n + g - 1;
    let i_load = 4 * n;

    for g in 1..=n {
        let gc = generation_constants(spec, damage, g);
        let z_top = Complex64::new(gc.r1, 0.0) + gc.l1 * s;
        let z_bot = Complex64::new(gc.r2, 0.0) + gc.l2 * s;
        let y_shunt = gc.shunt_admittance(s);

        // Top branch: T_{g-1} - T_g - z_top·IT_g = 0 (IT_g flows toward
        // the receiver).
        let row = g - 1;
        if g > 1 {
            a[row * dim + t(g - 1)] = Complex64::ONE;
        } else {
            b[row] = -Complex64::ONE;
        }
        a[row * dim + t(g)] = -Complex64::ONE;
        a[row * dim + it(g)] = -z_top;

        // Bottom branch: B_g - B_{g-1} - z_bot·IB_g = 0 (IB_g is the
        // return current, flowing toward the transmitter).
        let row = n + g - 1;
        a[row * dim + bo(g)] = Complex64::ONE;
        if g > 1 {
            a[row * dim + bo(g - 1)] = -Complex64::ONE;
        }
        a[row * dim + ib(g)] = -z_bot;

        // KCL at T_g: IT_g - Ysh_g·(T_g - B_g) - outgoing = 0.
        let row = 2 * n + g - 1;
        a[row * dim + it(g)] = Complex64::ONE;
        a[row * dim + t(g)] = -y_shunt;
        a[row * dim + bo(g)] = y_shunt;
        if g < n {
            a[row * dim + it(g + 1)] = -Complex64::ONE;
        } else {
            a[row * dim + i_load] = -Complex64::ONE;
        }

        // KCL at B_g: shunt inflow plus returning current minus IB_g = 0.
        let row = 3 * n + g - 1;
        a[row * dim + t(g)] = y_shunt;
        a[row * dim + bo(g)] = -y_shunt;
        if g < n {
            a[row * dim + ib(g + 1)] = Complex64::ONE;
        } else {
            a[row * dim + i_load] = Complex64::ONE;
        }
        a[row * dim + ib(g)] = -Complex64::ONE;
    }
    // Load: T_n - B_n - zOut·I_load = 0.
    a[i_load * dim + t(n)] = Complex64::ONE;
    a[i_load * dim + bo(n)] = -Complex64::ONE;
    a[i_load * dim + i_load] = -spec.z_out;

    let (x, residual) = solve_dense(a, &b)?;
    let mut node_voltages = Vec::with_capacity(n + 1);
    node_voltages.push(Complex64::ONE);
    node_voltages.extend((1..=n).map(|g| x[t(g)] - x[bo(g)]));
    let mut branch_currents = Vec::with_capacity(n + 1);
    branch_currents.extend((1..=n).map(|g| x[it(g)]));
    branch_currents.push(x[i_load]);
    Ok(DenseSolution {
        node_voltages,
        branch_currents,
        residual,
    })
}

/// Extracts `(Z_g, H_g)` at every node from a dense solution:
/// `Z_g = V_g/I_g` with `I_g` the current into the remaining subnetwork,
/// `H_g = V_out/V_g`.
pub fn extract_responses(sol: &DenseSolution, spec: &NetworkSpec) -> Result<Vec<NodeResponse>> {
    let n = spec.generations;
    if sol.node_voltages.len() != n + 1 || sol.branch_currents.len() != n + 1 {
        return Err(Error::InvalidInput(format!(
            "solution shape {}/{} does not match {} generations",
            sol.node_voltages.len(),
            sol.branch_currents.len(),
            n
        )));
    }
    let v_out = sol.node_voltages[n];
    let mut responses = Vec::with_capacity(n + 1);
    for g in 0..=n {
        let voltage = sol.node_voltages[g];
        let current = sol.branch_currents[g];
        if voltage == Complex64::ZERO {
            return Err(Error::SingularGain { node: g });
        }
        if current == Complex64::ZERO {
            return Err(Error::SingularImpedance { node: g });
        }
        responses.push(NodeResponse {
            impedance: voltage / current,
            gain: v_out / voltage,
        });
    }
    Ok(responses)
}
