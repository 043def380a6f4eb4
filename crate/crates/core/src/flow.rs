//! Flow maps `A_t` of planar ODEs and fractals carried along them.
//!
//! Three closed-form flows are provided:
//!
//! * `Linear(λ)`: `dz/dt = λz`, so `A_t z = z·e^{λt}`.
//! * `LimitCycle`: `dx/dt = −y + x(4 − x² − y²)`, `dy/dt = x + y(4 − x² − y²)`,
//!   i.e. `dz/dt = iz + z(4 − |z|²)`, whose orbits spiral onto the circle `|z| = 2`.
//!   In polar form `ρ(t) = 2 e^{4t} (4/ρ₀² + e^{8t} − 1)^{−1/2}`, `φ(t) = t + φ₀`.
//! * `PeriodicForced(a)`: the non-autonomous `dz/dt = az + e^{it}` with solution map
//!   `A_t z = (z + k)e^{at} − k e^{it}`, `k = (a + i)/(1 + a²)`.
//!
//! `NumericRk4` integrates any of these right-hand sides with fixed-step RK4.
//!
//! For the non-autonomous flow, [`flow_inverse`] is the inverse of the time-`t`
//! solution map (from time `t` back to time 0). It coincides with `A_{−t}` only
//! when `t` is a multiple of the forcing period `2π`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexPoint;
use crate::error::{invalid, Error, Result};
use crate::fji::{classify, IterParams};
use crate::grid::{GridSpec, OrbitResult, RasterField};

pub const DEFAULT_RK4_DT: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum FlowSpec {
    Linear { lambda: ComplexPoint },
    LimitCycle,
    PeriodicForced { a: f64 },
    NumericRk4 { base: Box<FlowSpec>, dt: f64 },
}

impl FlowSpec {
    pub fn linear(lambda: ComplexPoint) -> Self {
        FlowSpec::Linear { lambda }
    }

    pub fn periodic_forced(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::NonFinite("forcing coefficient"));
        }
        Ok(FlowSpec::PeriodicForced { a })
    }

    /// Fixed-step RK4 integration of a closed-form flow's right-hand side.
    pub fn rk4(base: FlowSpec, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid(format!("RK4 step must be positive, got {dt}")));
        }
        if matches!(base, FlowSpec::NumericRk4 { .. }) {
            return Err(invalid("RK4 base flow must be a closed-form kind"));
        }
        Ok(FlowSpec::NumericRk4 {
            base: Box::new(base),
            dt,
        })
    }

    pub fn is_autonomous(&self) -> bool {
        match self {
            FlowSpec::Linear { .. } | FlowSpec::LimitCycle => true,
            FlowSpec::PeriodicForced { .. } => false,
            FlowSpec::NumericRk4 { base, .. } => base.is_autonomous(),
        }
    }

    /// Right-hand side `g(t, z)` of the underlying ODE.
    pub fn rhs(&self, t: f64, z: Complex64) -> Complex64 {
        match self {
            FlowSpec::Linear { lambda } => lambda.to_c64() * z,
            FlowSpec::LimitCycle => Complex64::new(-z.im, z.re) + z * (4.0 - z.norm_sqr()),
            FlowSpec::PeriodicForced { a } => z * *a + Complex64::new(t.cos(), t.sin()),
            FlowSpec::NumericRk4 { base, .. } => base.rhs(t, z),
        }
    }
}

fn check(z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::Domain("flow produced a non-finite value"))
    }
}

/// `A_t z`: the state at time `t` of the solution starting at `z` at time 0.
pub fn flow_apply(flow: &FlowSpec, z: ComplexPoint, t: f64) -> Result<ComplexPoint> {
    ComplexPoint::try_from(flow_apply_c64(flow, z.to_c64(), t)?)
}

/// Inverse of the time-`t` solution map: the time-0 state that reaches `z` at time `t`.
pub fn flow_inverse(flow: &FlowSpec, z: ComplexPoint, t: f64) -> Result<ComplexPoint> {
    ComplexPoint::try_from(flow_inverse_c64(flow, z.to_c64(), t)?)
}

pub fn flow_apply_c64(flow: &FlowSpec, z: Complex64, t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("flow time"));
    }
    check(z)?;
    if t == 0.0 {
        return Ok(z);
    }
    let w = match flow {
        FlowSpec::Linear { lambda } => z * (lambda.to_c64() * t).exp(),
        FlowSpec::LimitCycle => limit_cycle(z, t)?,
        FlowSpec::PeriodicForced { a } => {
            let k = forcing_shift(*a);
            (z + k) * (a * t).exp() - k * Complex64::new(t.cos(), t.sin())
        }
        FlowSpec::NumericRk4 { base, dt } => rk4_integrate(base, z, 0.0, t, *dt)?,
    };
    check(w)
}

pub fn flow_inverse_c64(flow: &FlowSpec, w: Complex64, t: f64) -> Result<Complex64> {
    if !t.is_finite() {
        return Err(Error::NonFinite("flow time"));
    }
    check(w)?;
    if t == 0.0 {
        return Ok(w);
    }
    let z = match flow {
        FlowSpec::Linear { .. } | FlowSpec::LimitCycle => return flow_apply_c64(flow, w, -t),
        FlowSpec::PeriodicForced { a } => {
            let k = forcing_shift(*a);
            (w + k * Complex64::new(t.cos(), t.sin())) * (-a * t).exp() - k
        }
        FlowSpec::NumericRk4 { base, dt } => rk4_integrate(base, w, t, 0.0, *dt)?,
    };
    check(z)
}

/// `(a + i)/(1 + a²)`, the amplitude of the periodic particular solution.
fn forcing_shift(a: f64) -> Complex64 {
    Complex64::new(a, 1.0) / (1.0 + a * a)
}

fn limit_cycle(z: Complex64, t: f64) -> Result<Complex64> {
    let rho0_sq = z.norm_sqr();
    if rho0_sq == 0.0 {
        // The origin is an equilibrium.
        return Ok(z);
    }
    // ρ(t)² = 4 / (1 + (4/ρ₀² − 1) e^{−8t}), algebraically equal to the polar
    // solution but free of the e^{8t} overflow for large t.
    let denom = 1.0 + (4.0 / rho0_sq - 1.0) * (-8.0 * t).exp();
    if !(denom > 0.0) {
        return Err(Error::Domain(
            "limit-cycle trajectory leaves every bounded set in backward time",
        ));
    }
    let rho = 2.0 / denom.sqrt();
    let phi = z.arg() + t;
    Ok(Complex64::from_polar(rho, phi))
}

/// Fixed-step RK4 from `t0` to `t1` (either direction), step at most `dt`.
fn rk4_integrate(flow: &FlowSpec, z0: Complex64, t0: f64, t1: f64, dt: f64) -> Result<Complex64> {
    let span = t1 - t0;
    let steps = (span.abs() / dt).ceil().max(1.0) as u64;
    let h = span / steps as f64;
    let mut z = z0;
    for s in 0..steps {
        let t = t0 + s as f64 * h;
        let k1 = flow.rhs(t, z);
        let k2 = flow.rhs(t + 0.5 * h, z + k1 * (0.5 * h));
        let k3 = flow.rhs(t + 0.5 * h, z + k2 * (0.5 * h));
        let k4 = flow.rhs(t + h, z + k3 * h);
        z += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        check(z)?;
    }
    Ok(z)
}

/// `|∂_t A_t z − g(t, A_t z)|` with the time derivative taken by central differences.
pub fn ode_residual(flow: &FlowSpec, z: ComplexPoint, t: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(invalid(format!("difference step must be positive, got {h}")));
    }
    let z = z.to_c64();
    let fwd = flow_apply_c64(flow, z, t + h)?;
    let back = flow_apply_c64(flow, z, t - h)?;
    let here = flow_apply_c64(flow, z, t)?;
    let derivative = (fwd - back) / (2.0 * h);
    Ok((derivative - flow.rhs(t, here)).norm())
}

/// Raster of `A_t 𝓚_c`: each pixel is pulled back through the flow and classified.
pub fn fmi_flow_julia(
    grid: &GridSpec,
    c: ComplexPoint,
    flow: &FlowSpec,
    t: f64,
    params: &IterParams,
) -> Result<RasterField> {
    if !t.is_finite() {
        return Err(Error::NonFinite("flow time"));
    }
    let c = c.to_c64();
    Ok(RasterField::render(*grid, |z| match flow_inverse_c64(flow, z, t) {
        Ok(w) => classify(w, c, params),
        Err(_) => OrbitResult::INVALID,
    }))
}

/// One [`fmi_flow_julia`] section per entry of `t_values`.
pub fn trajectory_sweep(
    grid: &GridSpec,
    c: ComplexPoint,
    flow: &FlowSpec,
    t_values: &[f64],
    params: &IterParams,
) -> Result<Vec<RasterField>> {
    t_values
        .iter()
        .map(|&t| fmi_flow_julia(grid, c, flow, t, params))
        .collect()
}
