//! Invertible complex maps used to transport fractals.
//!
//! All multivalued functions use principal branches: `log` has imaginary part
//! in `(−π, π]`, `w^{1/n} = exp(log(w)/n)`, and `acos`/`asin` follow the usual
//! cuts on the real axis outside `[−1, 1]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::complex::ComplexPoint;
use crate::error::{invalid, Error, Result};
use crate::flow::{flow_apply_c64, flow_inverse_c64, FlowSpec};
use crate::grid::GridSpec;
use crate::sampling::Halton;

/// Radius of the excluded neighbourhoods around poles and singular points.
pub const SINGULAR_EXCLUSION: f64 = 1e-9;

/// Pairs closer than this are skipped when estimating Lipschitz ratios.
const MIN_PAIR_SEPARATION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MapKind {
    Identity,
    /// `z ↦ a·z + b` with `a ≠ 0`.
    Affine {
        a: ComplexPoint,
        b: ComplexPoint,
    },
    /// `z ↦ acos(1/z − 1)`, inverse `w ↦ 1/(1 + cos w)`.
    ArccosReciprocal,
    /// `z ↦ (asin z)^{1/5}`, inverse `w ↦ sin(w⁵)`.
    ArcsinRoot5,
    /// `c ↦ (1/c − 1)^{1/2}`, inverse `w ↦ 1/(w² + 1)`.
    ReciprocalSqrt,
    /// `z ↦ z² + a·c + b`, inverse through the principal square root.
    QuadraticParam {
        a: f64,
        b: ComplexPoint,
        c: ComplexPoint,
    },
    /// The time-`t` map of a flow.
    Flow {
        flow: FlowSpec,
        t: f64,
    },
    /// `f^times`: the base map composed with itself.
    Iterated {
        base: Box<MapSpec>,
        times: u32,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[default]
    Principal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapSpec {
    kind: MapKind,
    branch: Branch,
}

impl MapSpec {
    pub fn new(kind: MapKind) -> Result<Self> {
        match &kind {
            MapKind::Affine { a, .. } if a.to_c64() == Complex64::new(0.0, 0.0) => {
                return Err(invalid("affine map requires a ≠ 0"));
            }
            MapKind::QuadraticParam { a, .. } if !a.is_finite() => {
                return Err(Error::NonFinite("quadratic map parameter"));
            }
            MapKind::Flow { t, .. } if !t.is_finite() => return Err(Error::NonFinite("flow time")),
            _ => {}
        }
        Ok(Self {
            kind,
            branch: Branch::Principal,
        })
    }

    pub fn identity() -> Self {
        Self {
            kind: MapKind::Identity,
            branch: Branch::Principal,
        }
    }

    pub fn affine(a: ComplexPoint, b: ComplexPoint) -> Result<Self> {
        Self::new(MapKind::Affine { a, b })
    }

    pub fn arccos_reciprocal() -> Self {
        Self {
            kind: MapKind::ArccosReciprocal,
            branch: Branch::Principal,
        }
    }

    pub fn arcsin_root5() -> Self {
        Self {
            kind: MapKind::ArcsinRoot5,
            branch: Branch::Principal,
        }
    }

    pub fn reciprocal_sqrt() -> Self {
        Self {
            kind: MapKind::ReciprocalSqrt,
            branch: Branch::Principal,
        }
    }

    pub fn quadratic_param(a: f64, b: ComplexPoint, c: ComplexPoint) -> Result<Self> {
        Self::new(MapKind::QuadraticParam { a, b, c })
    }

    pub fn flow(flow: FlowSpec, t: f64) -> Result<Self> {
        Self::new(MapKind::Flow { flow, t })
    }

    /// `self` composed with itself `times` times; `times = 0` is the identity.
    pub fn iterated(&self, times: u32) -> Self {
        match times {
            0 => Self::identity(),
            1 => self.clone(),
            _ => Self {
                kind: MapKind::Iterated {
                    base: Box::new(self.clone()),
                    times,
                },
                branch: Branch::Principal,
            },
        }
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    pub fn branch(&self) -> Branch {
        self.branch
    }

    /// Registry name of the map kind.
    pub fn name(&self) -> &'static str {
        match self.kind {
            MapKind::Identity => "identity",
            MapKind::Affine { .. } => "affine",
            MapKind::ArccosReciprocal => "arccos_reciprocal",
            MapKind::ArcsinRoot5 => "arcsin_root5",
            MapKind::ReciprocalSqrt => "reciprocal_sqrt",
            MapKind::QuadraticParam { .. } => "quadratic_param",
            MapKind::Flow { .. } => "flow",
            MapKind::Iterated { .. } => "iterated",
        }
    }

    pub fn forward(&self, z: Complex64) -> Result<Complex64> {
        finite(z, "map argument")?;
        let w = match &self.kind {
            MapKind::Identity => z,
            MapKind::Affine { a, b } => a.to_c64() * z + b.to_c64(),
            MapKind::ArccosReciprocal => {
                if z.norm() <= SINGULAR_EXCLUSION {
                    return Err(Error::Domain("acos(1/z - 1) is singular at z = 0"));
                }
                (z.inv() - 1.0).acos()
            }
            MapKind::ArcsinRoot5 => principal_root(z.asin(), 5),
            MapKind::ReciprocalSqrt => {
                if z.norm() <= SINGULAR_EXCLUSION {
                    return Err(Error::Domain("(1/c - 1)^(1/2) is singular at c = 0"));
                }
                principal_root(z.inv() - 1.0, 2)
            }
            MapKind::QuadraticParam { a, b, c } => z * z + quadratic_shift(*a, *b, *c),
            MapKind::Flow { flow, t } => flow_apply_c64(flow, z, *t)?,
            MapKind::Iterated { base, times } => {
                let mut w = z;
                for _ in 0..*times {
                    w = base.forward(w)?;
                }
                w
            }
        };
        finite(w, "map value")
    }

    pub fn inverse(&self, w: Complex64) -> Result<Complex64> {
        finite(w, "map argument")?;
        let z = match &self.kind {
            MapKind::Identity => w,
            MapKind::Affine { a, b } => (w - b.to_c64()) / a.to_c64(),
            MapKind::ArccosReciprocal => {
                let d = w.cos() + 1.0;
                if d.norm() <= SINGULAR_EXCLUSION {
                    return Err(Error::Domain("1/(1 + cos w) has a pole where cos w = -1"));
                }
                d.inv()
            }
            MapKind::ArcsinRoot5 => w.powu(5).sin(),
            MapKind::ReciprocalSqrt => {
                let d = w * w + 1.0;
                if d.norm() <= SINGULAR_EXCLUSION {
                    return Err(Error::Domain("1/(w^2 + 1) has a pole where w^2 = -1"));
                }
                d.inv()
            }
            MapKind::QuadraticParam { a, b, c } => (w - quadratic_shift(*a, *b, *c)).sqrt(),
            MapKind::Flow { flow, t } => flow_inverse_c64(flow, w, *t)?,
            MapKind::Iterated { base, times } => {
                let mut z = w;
                for _ in 0..*times {
                    z = base.inverse(z)?;
                }
                z
            }
        };
        finite(z, "inverse map value")
    }
}

fn finite(z: Complex64, what: &'static str) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite(what))
    }
}

fn quadratic_shift(a: f64, b: ComplexPoint, c: ComplexPoint) -> Complex64 {
    c.to_c64() * a + b.to_c64()
}

/// `w^{1/n} = exp(log(w)/n)` with `0^{1/n} = 0`.
fn principal_root(w: Complex64, n: u32) -> Complex64 {
    if w == Complex64::new(0.0, 0.0) {
        return w;
    }
    (w.ln() / n as f64).exp()
}

/// Principal-branch value of `f(z)`.
pub fn eval_forward(m: &MapSpec, z: ComplexPoint) -> Result<ComplexPoint> {
    ComplexPoint::try_from(m.forward(z.to_c64())?)
}

/// Closed-form inverse `f⁻¹(w)`.
pub fn eval_inverse(m: &MapSpec, w: ComplexPoint) -> Result<ComplexPoint> {
    ComplexPoint::try_from(m.inverse(w.to_c64())?)
}

/// Sampled lower and upper Lipschitz constants of a map over a window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LipschitzBounds {
    pub l1: f64,
    pub l2: f64,
    /// Pairs that contributed to the bounds.
    pub pairs: usize,
}

/// Minimum and maximum of `|f(u) − f(v)| / |u − v|` over quasi-random pairs in `region`.
///
/// Pairs come from a 4-dimensional Halton sequence scaled to the window.
/// Points where `f` is undefined and pairs closer than `1e-12` are skipped.
pub fn estimate_bilipschitz(m: &MapSpec, region: &GridSpec, n_pairs: usize) -> Result<LipschitzBounds> {
    if n_pairs < 100 {
        return Err(invalid(format!("need at least 100 sample pairs, got {n_pairs}")));
    }
    let (x0, y0) = (region.re_min(), region.im_min());
    let (w, h) = (region.width(), region.height());
    let mut l1 = f64::INFINITY;
    let mut l2 = 0.0_f64;
    let mut pairs = 0;
    for [a, b, c, d] in Halton::<4>::new().take(n_pairs) {
        let u = Complex64::new(x0 + a * w, y0 + b * h);
        let v = Complex64::new(x0 + c * w, y0 + d * h);
        let sep = (u - v).norm();
        if sep <= MIN_PAIR_SEPARATION {
            continue;
        }
        let (Ok(fu), Ok(fv)) = (m.forward(u), m.forward(v)) else {
            continue;
        };
        let ratio = (fu - fv).norm() / sep;
        if !ratio.is_finite() {
            continue;
        }
        l1 = l1.min(ratio);
        l2 = l2.max(ratio);
        pairs += 1;
    }
    if pairs < 10 {
        return Err(Error::InsufficientSamples { valid: pairs });
    }
    Ok(LipschitzBounds { l1, l2, pairs })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_2;

    use super::*;

    fn cp(re: f64, im: f64) -> ComplexPoint {
        ComplexPoint::new(re, im)
    }

    fn close(a: ComplexPoint, b: ComplexPoint, tol: f64) -> bool {
        (a.to_c64() - b.to_c64()).norm() <= tol
    }

    #[test]
    fn arccos_reciprocal_at_one() {
        let m = MapSpec::arccos_reciprocal();
        let w = eval_forward(&m, ComplexPoint::ONE).unwrap();
        assert!(close(w, cp(FRAC_PI_2, 0.0), 1e-15));
        let z = eval_inverse(&m, cp(FRAC_PI_2, 0.0)).unwrap();
        assert!(close(z, ComplexPoint::ONE, 1e-15));
    }

    #[test]
    fn arcsin_root5_at_zero() {
        assert_eq!(
            eval_forward(&MapSpec::arcsin_root5(), ComplexPoint::ZERO).unwrap(),
            ComplexPoint::ZERO
        );
    }

    #[test]
    fn affine_forward_and_inverse() {
        let m = MapSpec::affine(cp(2.0, 0.0), cp(1.0, 0.0)).unwrap();
        assert_eq!(eval_forward(&m, ComplexPoint::I).unwrap(), cp(1.0, 2.0));
        assert_eq!(eval_inverse(&m, cp(1.0, 2.0)).unwrap(), ComplexPoint::I);
        assert!(MapSpec::affine(ComplexPoint::ZERO, ComplexPoint::ONE).is_err());
    }

    #[test]
    fn reciprocal_sqrt_inverse_at_zero() {
        assert_eq!(
            eval_inverse(&MapSpec::reciprocal_sqrt(), ComplexPoint::ZERO).unwrap(),
            ComplexPoint::ONE
        );
    }

    #[test]
    fn quadratic_param_inverse_at_shift() {
        let (a, b, c) = (0.6, cp(0.02, -0.02), cp(-0.175, -0.655));
        let m = MapSpec::quadratic_param(a, b, c).unwrap();
        let shift = ComplexPoint::try_from(c.to_c64() * a + b.to_c64()).unwrap();
        assert_eq!(eval_inverse(&m, shift).unwrap(), ComplexPoint::ZERO);
    }

    #[test]
    fn poles_are_domain_errors() {
        assert!(matches!(
            eval_forward(&MapSpec::arccos_reciprocal(), ComplexPoint::ZERO),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            eval_forward(&MapSpec::reciprocal_sqrt(), cp(1e-10, 0.0)),
            Err(Error::Domain(_))
        ));
        // cos π = −1
        assert!(matches!(
            eval_inverse(&MapSpec::arccos_reciprocal(), cp(std::f64::consts::PI, 0.0)),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            eval_inverse(&MapSpec::reciprocal_sqrt(), ComplexPoint::I),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn principal_root_branch() {
        // (−1)^{1/2} on the principal branch is +i.
        let r = principal_root(Complex64::new(-1.0, 0.0), 2);
        assert!((r - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let r5 = principal_root(Complex64::new(-32.0, 0.0), 5);
        assert!((r5 - Complex64::from_polar(2.0, std::f64::consts::PI / 5.0)).norm() < 1e-14);
    }

    #[test]
    fn iterated_composes() {
        let m = MapSpec::affine(cp(0.5, 0.0), cp(0.25, 0.0)).unwrap();
        let m3 = m.iterated(3);
        let z = cp(1.0, -1.0);
        let direct = eval_forward(&m, eval_forward(&m, eval_forward(&m, z).unwrap()).unwrap()).unwrap();
        assert_eq!(eval_forward(&m3, z).unwrap(), direct);
        assert_eq!(m.iterated(0), MapSpec::identity());
        assert_eq!(m.iterated(1), m);
    }

    #[test]
    fn lipschitz_identity_and_affine() {
        let g = GridSpec::square(cp(0.3, -0.2), 2.0, 16).unwrap();
        let id = estimate_bilipschitz(&MapSpec::identity(), &g, 1000).unwrap();
        assert!((id.l1 - 1.0).abs() <= 1e-12 && (id.l2 - 1.0).abs() <= 1e-12);
        let a = MapSpec::affine(cp(2.0, 0.0), cp(1.0, 0.0)).unwrap();
        let b = estimate_bilipschitz(&a, &g, 1000).unwrap();
        assert!((b.l1 - 2.0).abs() <= 1e-12 && (b.l2 - 2.0).abs() <= 1e-12);
        assert!(b.l1 <= b.l2);
    }

    #[test]
    fn lipschitz_errors() {
        let g = GridSpec::square(ComplexPoint::ZERO, 5e-13, 4).unwrap();
        assert!(matches!(
            estimate_bilipschitz(&MapSpec::identity(), &g, 50),
            Err(Error::InvalidParameter(_))
        ));
        // Every pair is closer than the separation cutoff.
        assert!(matches!(
            estimate_bilipschitz(&MapSpec::identity(), &g, 200),
            Err(Error::InsufficientSamples { .. })
        ));
        // Every point lies inside the excluded disk about the pole.
        assert!(matches!(
            estimate_bilipschitz(
                &MapSpec::arccos_reciprocal(),
                &GridSpec::square(ComplexPoint::ZERO, 1e-9, 4).unwrap(),
                200
            ),
            Err(Error::InsufficientSamples { .. })
        ));
    }
}
