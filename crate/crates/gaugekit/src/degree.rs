//! Brouwer degree of proper maps ℝⁿ → ℝⁿ by regular-value counting.
//!
//! Roots of f(x) = y are found by Newton polish from a grid of seeds inside
//! the properness box; each root carries the sign of det J, and the ℤ and
//! ℤ/2 degrees are the signed and unsigned counts.

use nalgebra::DMatrix;
use serde::Serialize;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DegreeError {
    #[error("singular root at {x:?}: |det J| = {det:.3e} below {tol:.3e}; perturb y")]
    SingularRoot { x: Vec<f64>, det: f64, tol: f64 },
    #[error("degree jump at t = {t}, y = {y:?}: {before} -> {after}")]
    DegreeJump {
        t: f64,
        y: Vec<f64>,
        before: i64,
        after: i64,
    },
    #[error("properness violated on the box boundary at {x:?}: |f| = {fx:.3e} <= |y| = {fy:.3e}")]
    PropernessViolated { x: Vec<f64>, fx: f64, fy: f64 },
}

type MapFn = dyn Fn(&[f64], &mut [f64]) + Send + Sync;
type JacFn = dyn Fn(&[f64], &mut DMatrix<f64>) + Send + Sync;

/// A smooth map ℝⁿ → ℝⁿ with Jacobian access and a properness box:
/// the caller asserts |f(x)| > |y| for x outside the box of radius `box_radius`.
#[derive(Clone)]
pub struct MapSpec {
    pub name: String,
    pub dim: usize,
    pub box_radius: f64,
    f: Arc<MapFn>,
    jac: Arc<JacFn>,
}

impl MapSpec {
    pub fn new(
        name: &str,
        dim: usize,
        box_radius: f64,
        f: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
        jac: impl Fn(&[f64], &mut DMatrix<f64>) + Send + Sync + 'static,
    ) -> Self {
        MapSpec {
            name: name.to_string(),
            dim,
            box_radius,
            f: Arc::new(f),
            jac: Arc::new(jac),
        }
    }

    /// Map with a finite-difference Jacobian.
    pub fn with_fd_jacobian(
        name: &str,
        dim: usize,
        box_radius: f64,
        f: impl Fn(&[f64], &mut [f64]) + Send + Sync + Clone + 'static,
    ) -> Self {
        let f2 = f.clone();
        let jac = move |x: &[f64], out: &mut DMatrix<f64>| {
            let h = 1e-6;
            let mut xp = x.to_vec();
            let mut fp = vec![0.0; dim];
            let mut fm = vec![0.0; dim];
            for j in 0..dim {
                xp[j] = x[j] + h;
                f2(&xp, &mut fp);
                xp[j] = x[j] - h;
                f2(&xp, &mut fm);
                xp[j] = x[j];
                for i in 0..dim {
                    out[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
                }
            }
        };
        MapSpec::new(name, dim, box_radius, f, jac)
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        (self.f)(x, &mut out);
        out
    }

    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.dim, self.dim);
        (self.jac)(x, &mut j);
        j
    }

    /// f(x) = x³ − 3x on ℝ.
    pub fn cubic() -> Self {
        MapSpec::new(
            "cubic",
            1,
            3.0,
            |x, out| out[0] = x[0] * x[0] * x[0] - 3.0 * x[0],
            |x, j| j[(0, 0)] = 3.0 * x[0] * x[0] - 3.0,
        )
    }

    /// The identity on ℝⁿ.
    pub fn identity(dim: usize, box_radius: f64) -> Self {
        MapSpec::new(
            "identity",
            dim,
            box_radius,
            |x, out| out.copy_from_slice(x),
            |_x, j| {
                j.fill(0.0);
                j.fill_diagonal(1.0);
            },
        )
    }

    /// z ↦ z² on ℂ = ℝ²: (x, y) ↦ (x² − y², 2xy).
    pub fn complex_square() -> Self {
        MapSpec::new(
            "square",
            2,
            3.0,
            |x, out| {
                out[0] = x[0] * x[0] - x[1] * x[1];
                out[1] = 2.0 * x[0] * x[1];
            },
            |x, j| {
                j[(0, 0)] = 2.0 * x[0];
                j[(0, 1)] = -2.0 * x[1];
                j[(1, 0)] = 2.0 * x[1];
                j[(1, 1)] = 2.0 * x[0];
            },
        )
    }

    /// Rotation of ℝ² by the given angle.
    pub fn rotation(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        MapSpec::new(
            "rotation",
            2,
            4.0,
            move |x, out| {
                out[0] = c * x[0] - s * x[1];
                out[1] = s * x[0] + c * x[1];
            },
            move |_x, j| {
                j[(0, 0)] = c;
                j[(0, 1)] = -s;
                j[(1, 0)] = s;
                j[(1, 1)] = c;
            },
        )
    }

    /// Polynomial map from a coefficient table: component i is
    /// Σ_t coeff_t · Π_j x_j^{e_{t,j}}.
    pub fn from_polynomial(name: &str, box_radius: f64, components: Vec<Vec<(f64, Vec<u32>)>>) -> Self {
        let dim = components.len();
        let comps = Arc::new(components);
        let c1 = comps.clone();
        let f = move |x: &[f64], out: &mut [f64]| {
            for (i, terms) in c1.iter().enumerate() {
                out[i] = terms
                    .iter()
                    .map(|(c, exps)| {
                        c * exps
                            .iter()
                            .enumerate()
                            .map(|(j, &e)| x[j].powi(e as i32))
                            .product::<f64>()
                    })
                    .sum();
            }
        };
        let c2 = comps.clone();
        let jac = move |x: &[f64], out: &mut DMatrix<f64>| {
            for (i, terms) in c2.iter().enumerate() {
                for j in 0..x.len() {
                    out[(i, j)] = terms
                        .iter()
                        .map(|(c, exps)| {
                            let e = exps[j];
                            if e == 0 {
                                return 0.0;
                            }
                            let mut prod = c * e as f64 * x[j].powi(e as i32 - 1);
                            for (k, &ek) in exps.iter().enumerate() {
                                if k != j {
                                    prod *= x[k].powi(ek as i32);
                                }
                            }
                            prod
                        })
                        .sum();
                }
            }
        };
        MapSpec::new(name, dim, box_radius, f, jac)
    }
}

/// A polished preimage of y with the sign of det J.
#[derive(Debug, Clone, Serialize)]
pub struct Root {
    pub x: Vec<f64>,
    pub det: f64,
    pub sign: i8,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton polish from grid seeds in the properness box; roots deduplicated
/// at distance 1e-6, each reporting sign(det J).
///
/// Errors with `SingularRoot` when a root has |det J| < `tol` — the value
/// y is then not regular and the caller must perturb it.
pub fn regular_preimages(
    map: &MapSpec,
    y: &[f64],
    grid_density: usize,
    tol: f64,
) -> Result<Vec<Root>, DegreeError> {
    assert_eq!(y.len(), map.dim);
    let n = map.dim;
    let r = map.box_radius;
    let seeds = grid_density.pow(n as u32);
    let mut roots: Vec<Root> = Vec::new();
    let mut fx = vec![0.0; n];
    for s in 0..seeds {
        // grid seed coordinates
        let mut x = vec![0.0; n];
        let mut rest = s;
        for xi in x.iter_mut() {
            let k = rest % grid_density;
            rest /= grid_density;
            *xi = -r + (2.0 * r) * (k as f64 + 0.5) / grid_density as f64;
        }
        // Newton iteration; after the residual first passes the tolerance,
        // take a few extra steps and watch the increment. Simple roots
        // converge quadratically to increments near machine precision;
        // stalled increments mean a multiple root, i.e. y is not regular.
        let mut ok = false;
        let mut polish_left = 3;
        let mut last_increment = f64::INFINITY;
        for _ in 0..80 {
            (map.f)(&x, &mut fx);
            let res: Vec<f64> = fx.iter().zip(y).map(|(a, b)| a - b).collect();
            if norm(&res) < 1e-12 {
                ok = true;
                if polish_left == 0 {
                    break;
                }
                polish_left -= 1;
            }
            let j = map.jacobian(&x);
            let Some(lu) = j.lu().solve(&DMatrix::from_column_slice(n, 1, &res)) else {
                break;
            };
            let step_norm = lu.norm();
            // damp huge steps to keep seeds from shooting far outside
            let scale = if step_norm > r { r / step_norm } else { 1.0 };
            for i in 0..n {
                x[i] -= scale * lu[(i, 0)];
            }
            last_increment = scale * step_norm;
            if x.iter().any(|v| v.abs() > 4.0 * r) {
                break;
            }
        }
        if !ok || x.iter().any(|v| !v.is_finite() || v.abs() > r + 1e-6) {
            continue;
        }
        if roots
            .iter()
            .any(|root| norm(&root.x.iter().zip(&x).map(|(a, b)| a - b).collect::<Vec<_>>()) < 1e-6)
        {
            continue;
        }
        let det = map.jacobian(&x).determinant();
        let stalled = last_increment > 1e-8 * (1.0 + norm(&x));
        if det.abs() < tol || stalled {
            return Err(DegreeError::SingularRoot {
                x,
                det: det.abs(),
                tol,
            });
        }
        roots.push(Root {
            x,
            det,
            sign: if det > 0.0 { 1 } else { -1 },
        });
    }
    // stable order for reproducible output
    roots.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap());
    Ok(roots)
}

/// ℤ-valued degree: Σ sign(det J) over the preimages of a regular value.
pub fn degree_z(map: &MapSpec, y: &[f64], grid_density: usize) -> Result<i64, DegreeError> {
    let roots = regular_preimages(map, y, grid_density, 1e-8)?;
    Ok(roots.iter().map(|r| r.sign as i64).sum())
}

/// ℤ/2-valued degree: the parity of the preimage count.
pub fn degree_mod2(map: &MapSpec, y: &[f64], grid_density: usize) -> Result<u8, DegreeError> {
    let roots = regular_preimages(map, y, grid_density, 1e-8)?;
    Ok((roots.len() % 2) as u8)
}

/// One row of a homotopy-invariance table.
#[derive(Debug, Clone, Serialize)]
pub struct HomotopyRow {
    pub t: f64,
    pub y: Vec<f64>,
    pub degree_z: i64,
    pub degree_mod2: u8,
}

/// Evaluate both degrees along a path of maps at several regular values and
/// check constancy. Properness is spot-checked on the box boundary; any
/// inconsistency raises `DegreeJump` naming the offending (t, y).
pub fn homotopy_invariance_report(
    path: impl Fn(f64) -> MapSpec,
    ts: &[f64],
    ys: &[Vec<f64>],
    grid_density: usize,
) -> Result<Vec<HomotopyRow>, DegreeError> {
    let mut rows = Vec::new();
    for y in ys {
        let mut prev: Option<(f64, i64, u8)> = None;
        for &t in ts {
            let map = path(t);
            // properness smoke test on a few boundary points
            let yn = norm(y);
            for k in 0..map.dim {
                for sgn in [-1.0, 1.0] {
                    let mut x = vec![0.0; map.dim];
                    x[k] = sgn * map.box_radius;
                    let fx = norm(&map.eval(&x));
                    if fx <= yn {
                        return Err(DegreeError::PropernessViolated {
                            x,
                            fx,
                            fy: yn,
                        });
                    }
                }
            }
            let dz = degree_z(&map, y, grid_density)?;
            let d2 = degree_mod2(&map, y, grid_density)?;
            if let Some((t0, z0, p0)) = prev {
                if z0 != dz || p0 != d2 {
                    let _ = t0;
                    return Err(DegreeError::DegreeJump {
                        t,
                        y: y.clone(),
                        before: z0,
                        after: dz,
                    });
                }
            }
            prev = Some((t, dz, d2));
            rows.push(HomotopyRow {
                t,
                y: y.clone(),
                degree_z: dz,
                degree_mod2: d2,
            });
        }
    }
    Ok(rows)
}
