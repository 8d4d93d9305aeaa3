//! The Chern–Simons functional on S³ for SU(2) connections.
//!
//! Everything is expressed in the left-invariant frame w_a(q) = q·e_a
//! (e₁ = i, e₂ = j, e₃ = k) and its dual coframe θ¹, θ², θ³, so a
//! connection is three su(2)-valued coefficient functions sampled on an
//! angular grid. The frame bracket is [w_a, w_b] = 2 w_c (cyclic), hence
//!
//!   dθᶜ = -2 θᵃ∧θᵇ   (a, b, c cyclic),
//!
//! and the Maurer–Cartan form θ = Σ e_a θᵃ satisfies dθ + θ∧θ = 0. With
//! tr(e_a e_b) = -2δ_ab and tr(e_a e_b e_c) = -2ε_abc in the 2×2 picture,
//! ∫ tr(θ∧dθ) = 12·Vol(S³) and ∫ tr(θ³) = -12·Vol(S³) = -24π², which fixes
//!
//!   ϑ(λθ) = 3λ² - 2λ³,   deg g = -(1/24π²)∫ tr((g⁻¹dg)³),   deg(id) = 1,
//!
//! with no residual sign freedom.
//!
//! Exterior derivatives of sampled coefficients are taken by central
//! finite differences between neighbouring grid samples; samples beyond a
//! chart edge come from the exact reflection identities of hyperspherical
//! coordinates, so every stencil sees smooth data.

use crate::chern::{ChernError, ChernReport};
use crate::group::{Su2, Su2Alg};
use crate::par;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CsError {
    #[error("grid resolution must be even and at least 8 per axis")]
    BadResolution,
    #[error(
        "grid too coarse: stencil orders disagree by {disagreement:.3e} (allowed {allowed:.3e})"
    )]
    GridTooCoarse { disagreement: f64, allowed: f64 },
    #[error("map too rough at grid scale: neighbouring values {angle:.3} apart (allowed 0.5)")]
    TooRough { angle: f64 },
    #[error("mismatched grids")]
    MismatchedGrid,
    #[error(transparent)]
    Report(#[from] ChernError),
}

/// Cyclic index pairs: entry i is (a_i, b_i) with (i, a_i, b_i) cyclic,
/// so θ^{a_i}∧θ^{b_i}∧θ^i is the volume form.
const CYCLIC: [(usize, usize); 3] = [(1, 2), (2, 0), (0, 1)];

/// Quadrature grid on S³ in hyperspherical angles
/// q = (cos χ, sin χ cos ϑ, sin χ sin ϑ cos φ, sin χ sin ϑ sin φ),
/// nodes at half-offset midpoints, weights cell-exact for the measure
/// sin²χ sin ϑ dχ dϑ dφ (they sum to Vol(S³) = 2π² to machine precision).
#[derive(Debug)]
pub struct S3Grid {
    n_chi: usize,
    n_theta: usize,
    n_phi: usize,
    points: Vec<[f64; 4]>,
    weights: Vec<f64>,
    /// Row a maps coordinate partials (∂_χ, ∂_ϑ, ∂_φ) to the frame
    /// derivative ∂_{w_a}.
    frame_coef: Vec<[[f64; 3]; 3]>,
}

fn quat_point(chi: f64, theta: f64, phi: f64) -> [f64; 4] {
    [
        chi.cos(),
        chi.sin() * theta.cos(),
        chi.sin() * theta.sin() * phi.cos(),
        chi.sin() * theta.sin() * phi.sin(),
    ]
}

const E_BASIS: [[f64; 4]; 3] = [
    [0.0, 1.0, 0.0, 0.0],
    [0.0, 0.0, 1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
];

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

impl S3Grid {
    pub fn new(n_chi: usize, n_theta: usize, n_phi: usize) -> Result<Arc<Self>, CsError> {
        for &n in &[n_chi, n_theta, n_phi] {
            if n < 8 || n % 2 != 0 {
                return Err(CsError::BadResolution);
            }
        }
        let (d_chi, d_theta, d_phi) = (PI / n_chi as f64, PI / n_theta as f64, TAU / n_phi as f64);
        let n_pts = n_chi * n_theta * n_phi;
        let mut points = Vec::with_capacity(n_pts);
        let mut weights = Vec::with_capacity(n_pts);
        let mut frame_coef = Vec::with_capacity(n_pts);
        for i in 0..n_chi {
            let chi = (i as f64 + 0.5) * d_chi;
            // cell-exact ∫ sin²χ dχ = [χ/2 - sin 2χ/4]
            let prim = |x: f64| 0.5 * x - 0.25 * (2.0 * x).sin();
            let w_chi = prim(chi + 0.5 * d_chi) - prim(chi - 0.5 * d_chi);
            for j in 0..n_theta {
                let theta = (j as f64 + 0.5) * d_theta;
                let w_theta = (theta - 0.5 * d_theta).cos() - (theta + 0.5 * d_theta).cos();
                for k in 0..n_phi {
                    let phi = (k as f64 + 0.5) * d_phi;
                    let q = quat_point(chi, theta, phi);
                    points.push(q);
                    weights.push(w_chi * w_theta * d_phi);

                    let (sc, cc) = chi.sin_cos();
                    let (st, ct) = theta.sin_cos();
                    let (sp, cp) = phi.sin_cos();
                    let t_chi = [-sc, cc * ct, cc * st * cp, cc * st * sp];
                    let t_theta = [0.0, -sc * st, sc * ct * cp, sc * ct * sp];
                    let t_phi = [0.0, 0.0, -sc * st * sp, sc * st * cp];
                    let mut m = [[0.0; 3]; 3];
                    for (a, e) in E_BASIS.iter().enumerate() {
                        let w = Su2::raw_mul(&q, e);
                        m[a][0] = dot4(&w, &t_chi);
                        m[a][1] = dot4(&w, &t_theta) / (sc * sc);
                        m[a][2] = dot4(&w, &t_phi) / (sc * st).powi(2);
                    }
                    frame_coef.push(m);
                }
            }
        }
        Ok(Arc::new(S3Grid {
            n_chi,
            n_theta,
            n_phi,
            points,
            weights,
            frame_coef,
        }))
    }

    /// Default production resolution.
    pub fn default_grid() -> Arc<Self> {
        S3Grid::new(32, 32, 64).expect("valid resolution")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn resolution(&self) -> (usize, usize, usize) {
        (self.n_chi, self.n_theta, self.n_phi)
    }

    pub fn point(&self, idx: usize) -> Su2 {
        let q = self.points[idx];
        Su2::new(q[0], q[1], q[2], q[3])
    }

    pub fn point_raw(&self, idx: usize) -> [f64; 4] {
        self.points[idx]
    }

    pub fn weight(&self, idx: usize) -> f64 {
        self.weights[idx]
    }

    pub fn total_weight(&self) -> f64 {
        par::ordered_sum(self.len(), |i| self.weights[i])
    }

    /// Largest grid spacing, the scale for truncation-error estimates.
    pub fn max_spacing(&self) -> f64 {
        (PI / self.n_chi as f64)
            .max(PI / self.n_theta as f64)
            .max(TAU / self.n_phi as f64)
    }

    /// The left-invariant orthonormal frame (w₁, w₂, w₃) at a grid point,
    /// as tangent 4-vectors.
    pub fn frame(&self, idx: usize) -> [[f64; 4]; 3] {
        let q = self.points[idx];
        [
            Su2::raw_mul(&q, &E_BASIS[0]),
            Su2::raw_mul(&q, &E_BASIS[1]),
            Su2::raw_mul(&q, &E_BASIS[2]),
        ]
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n_theta + j) * self.n_phi + k
    }

    fn split(&self, idx: usize) -> (usize, usize, usize) {
        let k = idx % self.n_phi;
        let rest = idx / self.n_phi;
        (rest / self.n_theta, rest % self.n_theta, k)
    }

    /// Resolve a raw (possibly out-of-range) angular index triple using the
    /// exact reflection identities
    ///   q(-χ, ϑ, φ) = q(χ, π-ϑ, φ+π),   q(χ, -ϑ, φ) = q(χ, ϑ, φ+π),
    /// so stencils on sampled functions see smooth data across every edge.
    fn wrap(&self, mut i: i64, mut j: i64, mut k: i64) -> usize {
        let (nc, nt, np) = (self.n_chi as i64, self.n_theta as i64, self.n_phi as i64);
        if i < 0 {
            i = -1 - i;
            j = nt - 1 - j;
            k += np / 2;
        } else if i >= nc {
            i = 2 * nc - 1 - i;
            j = nt - 1 - j;
            k += np / 2;
        }
        if j < 0 {
            j = -1 - j;
            k += np / 2;
        } else if j >= nt {
            j = 2 * nt - 1 - j;
            k += np / 2;
        }
        k = k.rem_euclid(np);
        self.index(i as usize, j as usize, k as usize)
    }

    /// In-range neighbour index offset by `step` cells along `axis`.
    fn neighbor(&self, idx: usize, axis: usize, step: i64) -> usize {
        let (i, j, k) = self.split(idx);
        let (mut ii, mut jj, mut kk) = (i as i64, j as i64, k as i64);
        match axis {
            0 => ii += step,
            1 => jj += step,
            _ => kk += step,
        }
        self.wrap(ii, jj, kk)
    }

    /// Frame-directional derivatives ∂_{w_a} f of one scalar channel of
    /// sampled data, by 2nd- or 4th-order central differences in the
    /// angular coordinates.
    fn frame_derivs(&self, fetch: &(dyn Fn(usize) -> f64 + Sync), fourth: bool) -> Vec<[f64; 3]> {
        let spacing = [
            PI / self.n_chi as f64,
            PI / self.n_theta as f64,
            TAU / self.n_phi as f64,
        ];
        par::ordered_map(self.len(), |idx| {
            let mut coord = [0.0; 3];
            for (axis, c) in coord.iter_mut().enumerate() {
                let d = spacing[axis];
                *c = if fourth {
                    let f_p1 = fetch(self.neighbor(idx, axis, 1));
                    let f_m1 = fetch(self.neighbor(idx, axis, -1));
                    let f_p2 = fetch(self.neighbor(idx, axis, 2));
                    let f_m2 = fetch(self.neighbor(idx, axis, -2));
                    (-f_p2 + 8.0 * f_p1 - 8.0 * f_m1 + f_m2) / (12.0 * d)
                } else {
                    (fetch(self.neighbor(idx, axis, 1)) - fetch(self.neighbor(idx, axis, -1)))
                        / (2.0 * d)
                };
            }
            let m = &self.frame_coef[idx];
            let mut out = [0.0; 3];
            for a in 0..3 {
                out[a] = m[a][0] * coord[0] + m[a][1] * coord[1] + m[a][2] * coord[2];
            }
            out
        })
    }
}

/// An su(2)-valued 1-form A = Σ_a c_a θᵃ sampled on a grid.
#[derive(Debug, Clone)]
pub struct InvariantFrameForm {
    grid: Arc<S3Grid>,
    coeffs: Vec<[Su2Alg; 3]>,
}

impl InvariantFrameForm {
    pub fn zero(grid: Arc<S3Grid>) -> Self {
        let coeffs = vec![[Su2Alg::zero(); 3]; grid.len()];
        InvariantFrameForm { grid, coeffs }
    }

    /// λ·θ, the Maurer–Cartan multiple with constant coefficients λ·e_a.
    pub fn maurer_cartan_multiple(grid: Arc<S3Grid>, lambda: f64) -> Self {
        let mut legs = [Su2Alg::zero(); 3];
        for (a, leg) in legs.iter_mut().enumerate() {
            leg.v[a] = lambda;
        }
        let coeffs = vec![legs; grid.len()];
        InvariantFrameForm { grid, coeffs }
    }

    pub fn from_fn(grid: Arc<S3Grid>, f: impl Fn(&[f64; 4]) -> [Su2Alg; 3] + Sync + Send) -> Self {
        let coeffs = par::ordered_map(grid.len(), |i| f(&grid.points[i]));
        InvariantFrameForm { grid, coeffs }
    }

    /// Smooth random form: each coefficient is an affine function of the
    /// ambient coordinates with amplitude-scaled random weights.
    pub fn random_smooth(grid: Arc<S3Grid>, seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = [[[0.0f64; 5]; 3]; 3];
        for leg in w.iter_mut() {
            for comp in leg.iter_mut() {
                for x in comp.iter_mut() {
                    *x = amplitude * rng.gen_range(-1.0..1.0);
                }
            }
        }
        InvariantFrameForm::from_fn(grid, move |q| {
            let mut out = [Su2Alg::zero(); 3];
            for (a, leg) in w.iter().enumerate() {
                for (b, ww) in leg.iter().enumerate() {
                    out[a].v[b] = ww[0] + ww[1] * q[0] + ww[2] * q[1] + ww[3] * q[2] + ww[4] * q[3];
                }
            }
            out
        })
    }

    pub fn grid(&self) -> &Arc<S3Grid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[[Su2Alg; 3]] {
        &self.coeffs
    }

    pub fn from_coeffs(grid: Arc<S3Grid>, coeffs: Vec<[Su2Alg; 3]>) -> Self {
        assert_eq!(coeffs.len(), grid.len());
        InvariantFrameForm { grid, coeffs }
    }

    /// self + s·other.
    pub fn axpy(&self, s: f64, other: &InvariantFrameForm) -> Result<Self, CsError> {
        if !Arc::ptr_eq(&self.grid, &other.grid) {
            return Err(CsError::MismatchedGrid);
        }
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(x, y)| {
                [
                    x[0].add(&y[0].scale(s)),
                    x[1].add(&y[1].scale(s)),
                    x[2].add(&y[2].scale(s)),
                ]
            })
            .collect();
        Ok(InvariantFrameForm {
            grid: self.grid.clone(),
            coeffs,
        })
    }

    /// ∂_{w_j} c_k for all j, k at the given stencil order.
    fn leg_derivs(&self, fourth: bool) -> Vec<[[Su2Alg; 3]; 3]> {
        let grid = &self.grid;
        let mut out = vec![[[Su2Alg::zero(); 3]; 3]; grid.len()];
        for k in 0..3 {
            for b in 0..3 {
                let coeffs = &self.coeffs;
                let channel = grid.frame_derivs(&move |idx: usize| coeffs[idx][k].v[b], fourth);
                for (o, d) in out.iter_mut().zip(channel) {
                    for (j, dj) in d.iter().enumerate() {
                        o[j][k].v[b] = *dj;
                    }
                }
            }
        }
        out
    }
}

/// A map g: S³ → SU(2) sampled on a grid.
#[derive(Debug, Clone)]
pub struct GroupMap {
    grid: Arc<S3Grid>,
    values: Vec<Su2>,
}

impl GroupMap {
    pub fn constant(grid: Arc<S3Grid>, g: Su2) -> Self {
        let values = vec![g; grid.len()];
        GroupMap { grid, values }
    }

    /// The identity map S³ → SU(2), q ↦ q.
    pub fn identity_map(grid: Arc<S3Grid>) -> Self {
        let values = par::ordered_map(grid.len(), |i| grid.point(i));
        GroupMap { grid, values }
    }

    pub fn from_values(grid: Arc<S3Grid>, values: Vec<Su2>) -> Self {
        assert_eq!(values.len(), grid.len());
        GroupMap { grid, values }
    }

    /// Pointwise product of two maps (adds degrees).
    pub fn pointwise_product(&self, other: &GroupMap) -> Result<Self, CsError> {
        if !Arc::ptr_eq(&self.grid, &other.grid) {
            return Err(CsError::MismatchedGrid);
        }
        use crate::group::GaugeGroup;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.mul(b))
            .collect();
        Ok(GroupMap {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn grid(&self) -> &Arc<S3Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[Su2] {
        &self.values
    }

    /// ω_a = Im(g⁻¹ ∂_{w_a} g): the pullback g*θ of the Maurer–Cartan form
    /// in frame components, with ∂g from grid finite differences.
    fn pullback_mc(&self, fourth: bool) -> Vec<[Su2Alg; 3]> {
        use crate::group::GaugeGroup;
        let grid = &self.grid;
        // derivative of each quaternion channel
        let mut dq = vec![[[0.0f64; 4]; 3]; grid.len()];
        for c in 0..4 {
            let values = &self.values;
            let channel = grid.frame_derivs(&move |idx: usize| values[idx].q()[c], fourth);
            for (o, d) in dq.iter_mut().zip(channel) {
                for (a, da) in d.iter().enumerate() {
                    o[a][c] = *da;
                }
            }
        }
        par::ordered_map(grid.len(), |idx| {
            let ginv = self.values[idx].inverse().q();
            let mut out = [Su2Alg::zero(); 3];
            for (a, o) in out.iter_mut().enumerate() {
                let prod = Su2::raw_mul(&ginv, &dq[idx][a]);
                // the exact derivative is purely imaginary; drop the
                // O(h²) real part of the finite difference
                *o = Su2Alg::new(prod[1], prod[2], prod[3]);
            }
            out
        })
    }

    /// Largest geodesic distance between neighbouring samples.
    fn max_neighbor_angle(&self) -> f64 {
        let grid = &self.grid;
        let per_point = par::ordered_map(grid.len(), |idx| {
            let mut worst = 0.0f64;
            for axis in 0..3 {
                let j = grid.neighbor(idx, axis, 1);
                worst = worst.max(self.values[idx].angle_to(&self.values[j]));
            }
            worst
        });
        per_point.into_iter().fold(0.0, f64::max)
    }
}

/// tr(ξη) = -2⟨v, w⟩ in the 2×2 picture.
fn tr2(a: &Su2Alg, b: &Su2Alg) -> f64 {
    -2.0 * a.dot(b)
}

/// Σ_cyc tr(c_i [c_{a_i}, c_{b_i}]) = 3 tr(c₁[c₂, c₃]), the volume
/// coefficient of tr(A∧A∧A).
fn cubic_volume_coeff(c: &[Su2Alg; 3]) -> f64 {
    let mut total = 0.0;
    for (i, &(a, b)) in CYCLIC.iter().enumerate() {
        total += tr2(&c[i], &c[a].bracket(&c[b]));
    }
    total
}

fn cs_value_at_order(a: &InvariantFrameForm, fourth: bool) -> f64 {
    let grid = a.grid().clone();
    let derivs = a.leg_derivs(fourth);
    par::ordered_sum(grid.len(), |idx| {
        let c = &a.coeffs()[idx];
        let d = &derivs[idx];
        let mut integrand = 0.0;
        for (i, &(p, q)) in CYCLIC.iter().enumerate() {
            // (dA)_i = ∂_{a_i} c_{b_i} - ∂_{b_i} c_{a_i} - 2 c_i
            let da_i = d[p][q].sub(&d[q][p]).sub(&c[i].scale(2.0));
            integrand += tr2(&c[i], &da_i);
        }
        integrand += (2.0 / 3.0) * cubic_volume_coeff(c);
        grid.weight(idx) * integrand
    }) / (8.0 * PI * PI)
}

/// Chern–Simons value ϑ(A) = (1/8π²)∫ tr(A∧dA + ⅔A∧A∧A).
///
/// Computed with 4th-order stencils; a 2nd-order pass cross-checks the
/// truncation error and raises `GridTooCoarse` when the two disagree by
/// more than 10·h² (h the largest grid spacing).
pub fn cs_value(a: &InvariantFrameForm) -> Result<f64, CsError> {
    let fine = cs_value_at_order(a, true);
    let coarse = cs_value_at_order(a, false);
    let h = a.grid().max_spacing();
    let allowed = 10.0 * h * h;
    let disagreement = (fine - coarse).abs();
    if disagreement > allowed {
        return Err(CsError::GridTooCoarse {
            disagreement,
            allowed,
        });
    }
    Ok(fine)
}

/// Curvature F = dA + ½[A∧A] in cyclic-pair components:
/// entry i is the coefficient of θ^{a_i}∧θ^{b_i}.
pub struct CurvatureForm {
    pub components: Vec<[Su2Alg; 3]>,
}

impl CurvatureForm {
    /// Largest pointwise component norm; a flatness detector.
    pub fn max_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|f| f.iter().map(|x| x.norm()).fold(0.0, f64::max))
            .fold(0.0, f64::max)
    }
}

pub fn curvature_form(a: &InvariantFrameForm) -> CurvatureForm {
    let derivs = a.leg_derivs(true);
    let components = par::ordered_map(a.grid().len(), |idx| {
        let c = &a.coeffs()[idx];
        let d = &derivs[idx];
        let mut out = [Su2Alg::zero(); 3];
        for (i, &(p, q)) in CYCLIC.iter().enumerate() {
            out[i] = d[p][q]
                .sub(&d[q][p])
                .sub(&c[i].scale(2.0))
                .add(&c[p].bracket(&c[q]));
        }
        out
    });
    CurvatureForm { components }
}

/// Gauge action A ↦ g⁻¹Ag + g⁻¹dg, pointwise with dg from grid finite
/// differences, projected back to the invariant coframe.
pub fn gauge_act(a: &InvariantFrameForm, g: &GroupMap) -> Result<InvariantFrameForm, CsError> {
    use crate::group::GaugeGroup;
    if !Arc::ptr_eq(a.grid(), g.grid()) {
        return Err(CsError::MismatchedGrid);
    }
    let mc = g.pullback_mc(true);
    let coeffs = par::ordered_map(a.grid().len(), |idx| {
        let ginv = g.values()[idx].inverse();
        let mut out = [Su2Alg::zero(); 3];
        for (leg, o) in out.iter_mut().enumerate() {
            let mut adj = [0.0; 3];
            ginv.adjoint_apply(&a.coeffs()[idx][leg].v, &mut adj);
            *o = Su2Alg { v: adj }.add(&mc[idx][leg]);
        }
        out
    });
    Ok(InvariantFrameForm {
        grid: a.grid().clone(),
        coeffs,
    })
}

/// Degree of a map S³ → SU(2): -(1/24π²)∫ tr((g⁻¹dg)³), an integer with
/// residual tolerance 1e-2 at production resolutions.
pub fn map_degree(g: &GroupMap) -> Result<ChernReport, CsError> {
    let angle = g.max_neighbor_angle();
    if angle > 0.5 {
        return Err(CsError::TooRough { angle });
    }
    let omega = g.pullback_mc(true);
    let grid = g.grid();
    let raw = par::ordered_sum(grid.len(), |idx| {
        grid.weight(idx) * cubic_volume_coeff(&omega[idx])
    }) / (-24.0 * PI * PI);
    Ok(ChernReport::try_new(raw, 1e-2)?)
}

/// Central finite difference of ϑ along a direction, against the analytic
/// pairing dϑ_A(a) = (1/4π²)∫ tr(F_A ∧ a). Returns (fd, pairing).
pub fn cs_gradient_check(
    a: &InvariantFrameForm,
    dir: &InvariantFrameForm,
    h: f64,
) -> Result<(f64, f64), CsError> {
    assert!((1e-6..=1e-2).contains(&h), "h must lie in [1e-6, 1e-2]");
    let plus = cs_value(&a.axpy(h, dir)?)?;
    let minus = cs_value(&a.axpy(-h, dir)?)?;
    let fd = (plus - minus) / (2.0 * h);

    let f = curvature_form(a);
    let grid = a.grid();
    // (F∧a)|vol = Σ_i tr(F_i a_i) on cyclic pairs
    let pairing = par::ordered_sum(grid.len(), |idx| {
        let mut s = 0.0;
        for i in 0..3 {
            s += tr2(&f.components[idx][i], &dir.coeffs()[idx][i]);
        }
        grid.weight(idx) * s
    }) / (4.0 * PI * PI);
    Ok((fd, pairing))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GaugeGroup;
    use approx::assert_relative_eq;

    fn grid() -> Arc<S3Grid> {
        S3Grid::new(24, 24, 48).unwrap()
    }

    #[test]
    fn weights_sum_to_volume_of_s3() {
        let g = grid();
        assert_relative_eq!(g.total_weight(), 2.0 * PI * PI, epsilon = 1e-9);
        assert!(g.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn frame_is_orthonormal_and_tangent() {
        let g = grid();
        for idx in [0, 17, 1000, g.len() - 1] {
            let f = g.frame(idx);
            for a in 0..3 {
                for b in 0..3 {
                    let d = dot4(&f[a], &f[b]);
                    let expect = if a == b { 1.0 } else { 0.0 };
                    assert!((d - expect).abs() < 1e-12);
                }
                assert!(dot4(&f[a], &g.points[idx]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn frame_derivatives_match_ambient_gradients() {
        // p(q) = q₀ restricted to S³ has ∂_{w_a} p = ⟨e₀, w_a⟩
        let g = grid();
        let lin: Vec<f64> = (0..g.len()).map(|i| g.points[i][0]).collect();
        let derivs = g.frame_derivs(&|i: usize| lin[i], true);
        for idx in [11, 700, 4321, g.len() - 5] {
            let frame = g.frame(idx);
            for a in 0..3 {
                assert!(
                    (derivs[idx][a] - frame[a][0]).abs() < 1e-5,
                    "idx {idx} leg {a}: {} vs {}",
                    derivs[idx][a],
                    frame[a][0]
                );
            }
        }
    }

    #[test]
    fn cs_of_zero_is_zero() {
        let a = InvariantFrameForm::zero(grid());
        assert_eq!(cs_value(&a).unwrap(), 0.0);
    }

    #[test]
    fn cs_of_maurer_cartan_multiples_matches_cubic() {
        let g = grid();
        for &lambda in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let a = InvariantFrameForm::maurer_cartan_multiple(g.clone(), lambda);
            let v = cs_value(&a).unwrap();
            let expect = 3.0 * lambda * lambda - 2.0 * lambda * lambda * lambda;
            assert!((v - expect).abs() < 1e-3, "λ = {lambda}: {v} vs {expect}");
        }
    }

    #[test]
    fn curvature_of_maurer_cartan_multiple() {
        let g = grid();
        for &lambda in &[0.0, 0.3, 1.0] {
            let a = InvariantFrameForm::maurer_cartan_multiple(g.clone(), lambda);
            let f = curvature_form(&a);
            // F = (λ² - λ)·θ∧θ, components 2(λ²-λ)e_i on cyclic pairs
            let expect = 2.0 * (lambda * lambda - lambda);
            for comp in f.components.iter().take(40) {
                for (i, x) in comp.iter().enumerate() {
                    for b in 0..3 {
                        let want = if b == i { expect } else { 0.0 };
                        assert!((x.v[b] - want).abs() < 1e-10);
                    }
                }
            }
            if lambda == 0.0 || lambda == 1.0 {
                assert!(f.max_norm() < 1e-10);
            } else {
                assert!(f.max_norm() > 0.1);
            }
        }
    }

    #[test]
    fn gauge_act_of_zero_by_identity_is_maurer_cartan() {
        let g = grid();
        let zero = InvariantFrameForm::zero(g.clone());
        let id = GroupMap::identity_map(g.clone());
        let theta = gauge_act(&zero, &id).unwrap();
        let mut worst = 0.0f64;
        for c in theta.coeffs() {
            for a in 0..3 {
                for b in 0..3 {
                    let want = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((c[a].v[b] - want).abs());
                }
            }
        }
        assert!(worst < 5e-4, "worst deviation {worst}");
    }

    #[test]
    fn degree_of_constant_map_is_zero() {
        let g = grid();
        let m = GroupMap::constant(g, Su2::exp(&Su2Alg::new(0.4, 0.1, -0.2)));
        let r = map_degree(&m).unwrap();
        assert_eq!(r.rounded, 0);
        assert!(r.raw.abs() < 1e-12);
    }

    #[test]
    fn degree_of_identity_map_is_one() {
        let r = map_degree(&GroupMap::identity_map(grid())).unwrap();
        assert_eq!(r.rounded, 1);
        assert!(r.residual < 1e-2, "residual {}", r.residual);
    }

    #[test]
    fn degree_of_square_map_is_stable_across_resolutions() {
        let coarse = S3Grid::new(24, 24, 48).unwrap();
        let fine = S3Grid::new(32, 32, 64).unwrap();
        let mut degs = Vec::new();
        for g in [coarse, fine] {
            let id = GroupMap::identity_map(g);
            let sq = id.pointwise_product(&id).unwrap();
            degs.push(map_degree(&sq).unwrap().rounded);
        }
        assert_eq!(degs[0], degs[1]);
        // pointwise products add degrees, so the square has degree 2
        assert_eq!(degs[0], 2);
    }

    #[test]
    fn rough_map_is_rejected() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let values = (0..g.len())
            .map(|_| {
                Su2::exp(&Su2Alg::new(
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                    rng.gen_range(-2.0..2.0),
                ))
            })
            .collect();
        let m = GroupMap::from_values(g, values);
        assert!(matches!(map_degree(&m), Err(CsError::TooRough { .. })));
    }

    #[test]
    fn shift_law_for_identity_gauge_on_small_random_forms() {
        let g = grid();
        let id = GroupMap::identity_map(g.clone());
        for seed in 0..3 {
            let a = InvariantFrameForm::random_smooth(g.clone(), seed, 0.05);
            let before = cs_value(&a).unwrap();
            let after = cs_value(&gauge_act(&a, &id).unwrap()).unwrap();
            let shift = after - before;
            assert!((shift - 1.0).abs() < 2e-3, "seed {seed}: shift {shift}");
        }
    }

    #[test]
    fn shift_law_for_constant_gauge() {
        let g = grid();
        let c = GroupMap::constant(g.clone(), Su2::exp(&Su2Alg::new(0.3, -0.7, 0.5)));
        let a = InvariantFrameForm::random_smooth(g.clone(), 5, 0.1);
        let before = cs_value(&a).unwrap();
        let after = cs_value(&gauge_act(&a, &c).unwrap()).unwrap();
        assert!((after - before).abs() < 2e-3);
    }

    #[test]
    fn gradient_check_on_maurer_cartan_line() {
        let g = grid();
        // A = 0.5θ, a = θ: both sides reduce to d/dλ (3λ²-2λ³) at 0.5
        let a = InvariantFrameForm::maurer_cartan_multiple(g.clone(), 0.5);
        let dir = InvariantFrameForm::maurer_cartan_multiple(g.clone(), 1.0);
        let (fd, pairing) = cs_gradient_check(&a, &dir, 1e-4).unwrap();
        let expect = 6.0 * 0.5 - 6.0 * 0.25;
        assert!((fd - expect).abs() < 1e-3, "fd {fd} vs {expect}");
        assert!((pairing - expect).abs() < 1e-3, "pairing {pairing}");
        assert!((fd - pairing).abs() < 1e-3);
    }

    #[test]
    fn gradient_vanishes_at_flat_connections() {
        let g = grid();
        let a = InvariantFrameForm::maurer_cartan_multiple(g.clone(), 1.0);
        let dir = InvariantFrameForm::random_smooth(g.clone(), 9, 0.3);
        let (fd, pairing) = cs_gradient_check(&a, &dir, 1e-4).unwrap();
        assert!(fd.abs() < 1e-3, "fd {fd}");
        assert!(pairing.abs() < 1e-3, "pairing {pairing}");
    }

    #[test]
    fn gradient_check_zero_direction() {
        let g = grid();
        let a = InvariantFrameForm::random_smooth(g.clone(), 2, 0.2);
        let dir = InvariantFrameForm::zero(g);
        let (fd, pairing) = cs_gradient_check(&a, &dir, 1e-4).unwrap();
        assert_eq!(fd, 0.0);
        assert_eq!(pairing, 0.0);
    }

    #[test]
    fn shift_error_shrinks_under_refinement() {
        let mut errs = Vec::new();
        for n in [12usize, 24] {
            let g = S3Grid::new(n, n, 2 * n).unwrap();
            let id = GroupMap::identity_map(g.clone());
            let a = InvariantFrameForm::random_smooth(g.clone(), 3, 0.05);
            let shift = cs_value(&gauge_act(&a, &id).unwrap()).unwrap() - cs_value(&a).unwrap();
            errs.push((shift - 1.0).abs());
        }
        assert!(
            errs[0] > 2.0 * errs[1] || errs[1] < 1e-6,
            "errors {errs:?} should shrink at least first order"
        );
    }
}
