//! Chern–Weil characteristic numbers.
//!
//! * `c1_lattice`: first Chern number of a U(1) field on T² from
//!   principal-branch plaquette logs; exactly integer up to float error.
//! * `c2_abelian_t4`: second Chern number of an abelian-embedded SU(2)
//!   constant-flux field on T⁴ via the lattice sum of tr(F∧F).
//! * `hopf_curvature_integral`: the curvature integral of the Hopf-bundle
//!   connection over S², by two-chart quadrature.

use crate::field::{FieldError, LinkField};
use crate::group::{GaugeGroup, Su2, U1};
use crate::lattice::TorusLattice;
use crate::par;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChernError {
    #[error("plaquette angle within 1e-12 of ±π: branch choice unstable")]
    BranchAmbiguity,
    #[error("characteristic number {raw} is not within {tol} of an integer")]
    NotInteger { raw: f64, tol: f64 },
    #[error("flux matrix must be antisymmetric")]
    NotAntisymmetric,
    #[error("grid too coarse: chart integrals disagree by {disagreement:.3e}")]
    GridTooCoarse { disagreement: f64 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// A characteristic number: raw value, nearest integer, and the residual.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChernReport {
    pub raw: f64,
    pub rounded: i64,
    pub residual: f64,
}

impl ChernReport {
    pub fn try_new(raw: f64, tol: f64) -> Result<Self, ChernError> {
        let rounded = raw.round() as i64;
        let residual = (raw - rounded as f64).abs();
        if residual > tol {
            return Err(ChernError::NotInteger { raw, tol });
        }
        Ok(ChernReport {
            raw,
            rounded,
            residual,
        })
    }
}

fn checked_angle(u: U1) -> Result<f64, ChernError> {
    let a = u.angle();
    if (a.abs() - PI).abs() < 1e-12 {
        return Err(ChernError::BranchAmbiguity);
    }
    Ok(a)
}

/// First Chern number of a U(1) field on T²: (1/2π)·Σ_p arg U_p.
///
/// Every link enters the plaquette-angle sum twice with opposite signs, so
/// the sum is a multiple of 2π up to float error; the residual tolerance
/// is 1e-9.
pub fn c1_lattice(field: &LinkField<U1>) -> Result<ChernReport, ChernError> {
    assert_eq!(field.lattice().dim(), 2, "c1_lattice needs a 2-torus");
    let mut total = 0.0;
    for p in 0..field.lattice().n_plaquettes() {
        total += checked_angle(field.plaquette_holonomy(p)?)?;
    }
    ChernReport::try_new(total / TAU, 1e-9)
}

/// Linkwise tensor combination U1^{k1}·U2^{k2} of two U(1) fields on the
/// same lattice (tensor powers and duals of line bundles).
pub fn combine_u1(
    f1: &LinkField<U1>,
    f2: &LinkField<U1>,
    k1: i64,
    k2: i64,
) -> Result<LinkField<U1>, ChernError> {
    if f1.lattice() != f2.lattice() {
        return Err(ChernError::Field(FieldError::MismatchedLattice(
            f1.lattice().sizes().to_vec(),
            f2.lattice().sizes().to_vec(),
        )));
    }
    let links = f1
        .links()
        .iter()
        .zip(f2.links())
        .map(|(a, b)| a.pow(k1).mul(&b.pow(k2)))
        .collect();
    Ok(LinkField::from_links(f1.lattice().clone(), links))
}

/// Second Chern number of the SU(2) field obtained by embedding the U(1)
/// constant-flux field with fluxes m on T⁴ along a fixed su(2) axis.
///
/// Q = (1/8π²)·Σ_x 2[tr(F₀₁F₂₃) − tr(F₀₂F₁₃) + tr(F₀₃F₁₂)] with the
/// per-plaquette log field strength F_{μν}(x). For constant-flux fields the
/// plaquette logs are exact, so the sum evaluates to
/// -2(m₀₁m₂₃ − m₀₂m₁₃ + m₀₃m₁₂) up to rounding; residual tolerance 1e-6.
pub fn c2_abelian_t4(m: &[[i64; 4]; 4], n: usize) -> Result<ChernReport, ChernError> {
    for mu in 0..4 {
        if m[mu][mu] != 0 {
            return Err(ChernError::NotAntisymmetric);
        }
        for nu in 0..4 {
            if m[mu][nu] != -m[nu][mu] {
                return Err(ChernError::NotAntisymmetric);
            }
        }
    }
    let u1 = LinkField::constant_flux_t4(n, m)?;
    // embed along the first su(2) axis: e^{iθ} ↦ exp(θ·e₁) = diag(e^{iθ}, e^{-iθ})
    let su2_links: Vec<Su2> = u1
        .links()
        .iter()
        .map(|u| Su2::exp_coords(&[u.angle(), 0.0, 0.0]))
        .collect();
    let field = LinkField::from_links(u1.lattice().clone(), su2_links);
    let lat = field.lattice().clone();

    // per-site field strength on the six planes, as su(2) algebra vectors
    let n_planes = lat.n_planes();
    let mut q_total = 0.0;
    for site in 0..lat.n_sites() {
        let mut f = vec![[0.0f64; 3]; n_planes];
        for plane in 0..n_planes {
            let p = lat.plaquette_index(site, plane);
            let hol = field.plaquette_holonomy(p)?;
            let xi = hol.log().map_err(|_| ChernError::BranchAmbiguity)?;
            if (xi.norm() - PI).abs() < 1e-12 {
                return Err(ChernError::BranchAmbiguity);
            }
            f[plane] = xi.v;
        }
        // tr(F∧F) coefficient: 2·[tr(F01 F23) − tr(F02 F13) + tr(F03 F12)],
        // with tr(ξη) = -2⟨v,w⟩
        let pair = |a: usize, b: usize| -> f64 {
            let (x, y) = (f[a], f[b]);
            -2.0 * (x[0] * y[0] + x[1] * y[1] + x[2] * y[2])
        };
        let p01_23 = pair(lat.plane_index(0, 1), lat.plane_index(2, 3));
        let p02_13 = pair(lat.plane_index(0, 2), lat.plane_index(1, 3));
        let p03_12 = pair(lat.plane_index(0, 3), lat.plane_index(1, 2));
        q_total += 2.0 * (p01_23 - p02_13 + p03_12);
    }
    ChernReport::try_new(q_total / (8.0 * PI * PI), 1e-6)
}

/// Result of the Hopf-bundle curvature quadrature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HopfReport {
    /// ∫_{S²} F, expected 2πi.
    pub integral: Complex64,
    /// Chart contributions (each expected πi).
    pub charts: [Complex64; 2],
    /// c₁ = (i/2π)·∫F, expected -1.
    pub c1: ChernReport,
}

/// Ambient connection coefficients of a = (-x₁dx₀ + x₀dx₁ - x₃dx₂ + x₂dx₃)i
/// at a point of S³.
fn ambient_a(x: &[f64; 4]) -> [f64; 4] {
    [-x[1], x[0], -x[3], x[2]]
}

/// Section of the Hopf bundle over a chart of ℂ and its chart derivatives.
/// `inner` is w ↦ (1, w)/√(1+|w|²); the outer chart is w' ↦ (w', 1)/√(1+|w'|²).
fn section(inner: bool, u: f64, v: f64) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let c = 1.0 / (1.0 + u * u + v * v).sqrt();
    let c3 = c * c * c;
    if inner {
        // x = (c, 0, u c, v c)
        let x = [c, 0.0, u * c, v * c];
        let du = [-u * c3, 0.0, c - u * u * c3, -u * v * c3];
        let dv = [-v * c3, 0.0, -u * v * c3, c - v * v * c3];
        (x, du, dv)
    } else {
        // x = (u c, v c, c, 0)
        let x = [u * c, v * c, c, 0.0];
        let du = [c - u * u * c3, -u * v * c3, -u * c3, 0.0];
        let dv = [-u * v * c3, c - v * v * c3, -v * c3, 0.0];
        (x, du, dv)
    }
}

/// Pullback 1-form σ*a at (u, v): returns (a_u, a_v), both purely
/// imaginary coefficients reported as reals (factor i implicit).
fn pullback_a(inner: bool, u: f64, v: f64) -> (f64, f64) {
    let (x, du, dv) = section(inner, u, v);
    let a = ambient_a(&x);
    let au = a[0] * du[0] + a[1] * du[1] + a[2] * du[2] + a[3] * du[3];
    let av = a[0] * dv[0] + a[1] * dv[1] + a[2] * dv[2] + a[3] * dv[3];
    (au, av)
}

/// σ*a in polar components: a_r and a_θ at radius r, angle t.
fn pullback_polar(inner: bool, r: f64, t: f64) -> (f64, f64) {
    let (u, v) = (r * t.cos(), r * t.sin());
    let (au, av) = pullback_a(inner, u, v);
    let ar = au * t.cos() + av * t.sin();
    let at = r * (-au * t.sin() + av * t.cos());
    (ar, at)
}

/// ∫ F over the unit disk of one chart, F = d(σ*a) by central finite
/// differences of the polar components on an n×n midpoint grid.
fn chart_integral(inner: bool, n: usize) -> f64 {
    let dr = 1.0 / n as f64;
    let dt = TAU / n as f64;
    par::ordered_sum(n * n, |idx| {
        let (i, j) = (idx / n, idx % n);
        let r = (i as f64 + 0.5) * dr;
        let t = (j as f64 + 0.5) * dt;
        // F_{rθ} = ∂_r a_θ − ∂_θ a_r by central differences at grid
        // spacing; the pullback form is analytic on the whole chart plane
        // (negative first argument is the smooth continuation through the
        // origin), so the stencil needs no special casing at r ≈ 0.
        let da_t =
            (pullback_polar(inner, r + dr, t).1 - pullback_polar(inner, r - dr, t).1) / (2.0 * dr);
        let da_r =
            (pullback_polar(inner, r, t + dt).0 - pullback_polar(inner, r, t - dt).0) / (2.0 * dt);
        (da_t - da_r) * dr * dt
    })
}

/// Curvature integral of the Hopf connection over S² on two stereographic
/// charts glued at |w| = 1, each with an n×n polar midpoint grid.
///
/// Returns the complex integral (expected 2πi) and the rounded first Chern
/// number (expected -1).
pub fn hopf_curvature_integral(n: usize) -> Result<HopfReport, ChernError> {
    assert!(n >= 8, "grid must have at least 8 cells per axis");
    let inner = chart_integral(true, n);
    let outer = chart_integral(false, n);
    let tol = 1e-4 * (256.0 / n as f64).powi(2);
    let disagreement = (inner - outer).abs();
    if disagreement > 10.0 * tol.max(1e-12) {
        return Err(ChernError::GridTooCoarse { disagreement });
    }
    let total = Complex64::new(0.0, inner + outer);
    // c₁ = (i/2π)·∫F
    let c1_raw = (Complex64::i() / TAU * total).re;
    let c1 = ChernReport::try_new(c1_raw, 1e-3)?;
    Ok(HopfReport {
        integral: total,
        charts: [Complex64::new(0.0, inner), Complex64::new(0.0, outer)],
        c1,
    })
}

/// Convenience: lattice plus flux on T², used by several modules.
pub fn flux_field(n: usize, m: i64) -> LinkField<U1> {
    LinkField::constant_flux_t2(n, m).expect("valid torus size")
}

/// Random U(1) field on an n×n torus.
pub fn random_u1_t2(n: usize, seed: u64, roughness: f64) -> LinkField<U1> {
    let lat = Arc::new(TorusLattice::new(2, &[n, n]).unwrap());
    LinkField::random(lat, seed, roughness)
}
