//! Parallel transport, monodromy of flat fields, and representation
//! varieties of finitely presented groups.
//!
//! Words are sequences of signed 1-based generator indices read left to
//! right: `[1, 2, -1, -2]` is the commutator a·b·a⁻¹·b⁻¹. The solver does
//! Gauss–Newton with Levenberg damping on r(ρ) = Σ ‖ρ(word) − 1‖², stepping
//! in the Lie algebra and retracting through the exponential so iterates
//! stay exactly on the group.

use crate::field::LinkField;
use crate::group::{GaugeGroup, GroupError};
use crate::lattice::LatticeError;
use nalgebra::DMatrix;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HolonomyError {
    #[error("bad path: {0}")]
    BadPath(#[from] LatticeError),
    #[error("field is not flat: wilson energy {energy:.3e} above {tol:.3e}")]
    NotFlat { energy: f64, tol: f64 },
    #[error("solver did not converge: best residual {residual:.3e}")]
    NotConverged { residual: f64 },
    #[error("bad presentation: {0}")]
    BadPresentation(String),
    #[error("relator residual {residual:.3e} too large for a tangent computation")]
    NotASolution { residual: f64 },
    #[error(
        "rank ambiguous: singular value {value:.3e} within a factor 10 of the cutoff {cutoff:.3e}"
    )]
    RankAmbiguous { value: f64, cutoff: f64 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A finitely presented group: generator count and relator words.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentedGroup {
    pub generators: usize,
    pub relators: Vec<Vec<i32>>,
}

impl PresentedGroup {
    pub fn new(generators: usize, relators: Vec<Vec<i32>>) -> Result<Self, HolonomyError> {
        for w in &relators {
            for &s in w {
                let k = s.unsigned_abs() as usize;
                if s == 0 || k > generators {
                    return Err(HolonomyError::BadPresentation(format!(
                        "letter {s} out of range for {generators} generators"
                    )));
                }
            }
        }
        Ok(PresentedGroup {
            generators,
            relators,
        })
    }

    /// Free group on n generators.
    pub fn free(n: usize) -> Self {
        PresentedGroup {
            generators: n,
            relators: vec![],
        }
    }

    /// ⟨a, b | [a,b]⟩, the fundamental group of T².
    pub fn torus() -> Self {
        PresentedGroup {
            generators: 2,
            relators: vec![vec![1, 2, -1, -2]],
        }
    }

    /// Surface group of the given genus: one product-of-commutators relator.
    pub fn surface(genus: usize) -> Self {
        let mut w = Vec::new();
        for i in 0..genus {
            let a = (2 * i + 1) as i32;
            let b = (2 * i + 2) as i32;
            w.extend_from_slice(&[a, b, -a, -b]);
        }
        PresentedGroup {
            generators: 2 * genus,
            relators: vec![w],
        }
    }
}

/// A point of the representation variety: images of the generators.
#[derive(Debug, Clone)]
pub struct RepresentationPoint<G: GaugeGroup> {
    pub images: Vec<G>,
}

/// Evaluate a word at a representation point (left-to-right product).
pub fn evaluate_word<G: GaugeGroup>(images: &[G], word: &[i32]) -> G {
    let mut acc = G::identity();
    for &s in word {
        let g = images[(s.unsigned_abs() - 1) as usize];
        let f = if s > 0 { g } else { g.inverse() };
        acc = acc.mul(&f);
    }
    acc
}

/// Residual vector of one relator: raw components of ρ(w) − 1.
fn relator_components<G: GaugeGroup>(images: &[G], word: &[i32], out: &mut [f64]) {
    let w = evaluate_word(images, word);
    let raw = w.to_raw();
    let id = G::identity().to_raw();
    for (o, (r, i)) in out.iter_mut().zip(raw.iter().zip(id.iter())) {
        *o = r - i;
    }
}

/// Σ ‖ρ(w) − 1‖² over the relators (squared residual).
pub fn relator_residual_sq<G: GaugeGroup>(group: &PresentedGroup, rho: &RepresentationPoint<G>) -> f64 {
    let width = G::identity().to_raw().len();
    let mut buf = vec![0.0; width];
    let mut total = 0.0;
    for w in &group.relators {
        relator_components(&rho.images, w, &mut buf);
        total += buf.iter().map(|x| x * x).sum::<f64>();
    }
    total
}

/// Norm residual sqrt(Σ ‖ρ(w) − 1‖²), the quantity solver tolerances refer to.
pub fn relator_residual<G: GaugeGroup>(group: &PresentedGroup, rho: &RepresentationPoint<G>) -> f64 {
    relator_residual_sq(group, rho).sqrt()
}

/// Analytic Jacobian of the stacked relator components with respect to
/// left translations exp(ε ξ)·g_k of each generator.
fn relator_jacobian<G: GaugeGroup>(
    group: &PresentedGroup,
    images: &[G],
    raw_width: usize,
) -> DMatrix<f64> {
    let n = images.len();
    let d = G::ALG_DIM;
    let rows = group.relators.len() * raw_width;
    let mut jac = DMatrix::zeros(rows, n * d);
    // direction basis in the algebra
    let mut basis = vec![vec![0.0; d]; d];
    for (a, e) in basis.iter_mut().enumerate() {
        e[a] = 1.0;
    }
    let h = 1e-6;
    for (ri, word) in group.relators.iter().enumerate() {
        for k in 0..n {
            if !word.iter().any(|s| (s.unsigned_abs() - 1) as usize == k) {
                continue;
            }
            for a in 0..d {
                // central difference through the group exponential; exact
                // enough for Gauss-Newton (the solve is re-linearized anyway)
                let mut plus = images.to_vec();
                let mut minus = images.to_vec();
                let step: Vec<f64> = basis[a].iter().map(|x| x * h).collect();
                let nstep: Vec<f64> = basis[a].iter().map(|x| -x * h).collect();
                plus[k] = G::exp_coords(&step).mul(&images[k]);
                minus[k] = G::exp_coords(&nstep).mul(&images[k]);
                let wp = evaluate_word(&plus, word).to_raw();
                let wm = evaluate_word(&minus, word).to_raw();
                for c in 0..raw_width {
                    jac[(ri * raw_width + c, k * d + a)] = (wp[c] - wm[c]) / (2.0 * h);
                }
            }
        }
    }
    jac
}

/// Gauss–Newton search for a representation with relator residual ≤ tol.
///
/// Starts from seeded random images; deterministic for a fixed seed. The
/// free group (no relators) returns the start unchanged.
pub fn solve_representation<G: GaugeGroup>(
    group: &PresentedGroup,
    seed: u64,
    tol: f64,
    max_iter: usize,
) -> Result<RepresentationPoint<G>, HolonomyError> {
    assert!(tol > 0.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let images: Vec<G> = (0..group.generators)
        .map(|_| G::exp_coords(&crate::field::ball_sample(&mut rng, G::ALG_DIM, 1.5)))
        .collect();
    let mut rho = RepresentationPoint { images };
    if group.relators.is_empty() {
        return Ok(rho);
    }
    let raw_width = G::identity().to_raw().len();
    let d = G::ALG_DIM;
    let n = group.generators;
    let mut lambda = 1e-3;
    let mut res_sq = relator_residual_sq(group, &rho);
    for _ in 0..max_iter {
        if res_sq.sqrt() <= tol {
            return Ok(rho);
        }
        let jac = relator_jacobian(group, &rho.images, raw_width);
        let mut r = DMatrix::zeros(group.relators.len() * raw_width, 1);
        let mut buf = vec![0.0; raw_width];
        for (ri, w) in group.relators.iter().enumerate() {
            relator_components(&rho.images, w, &mut buf);
            for c in 0..raw_width {
                r[(ri * raw_width + c, 0)] = buf[c];
            }
        }
        let jt = jac.transpose();
        let jtj = &jt * &jac;
        let jtr = &jt * &r;
        // Levenberg: damp until a step decreases the residual
        let mut improved = false;
        for _ in 0..40 {
            let damped = &jtj + DMatrix::identity(n * d, n * d) * lambda;
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&jtr);
            let mut candidate = rho.images.clone();
            for k in 0..n {
                let xi: Vec<f64> = (0..d).map(|a| -delta[(k * d + a, 0)]).collect();
                candidate[k] = G::exp_coords(&xi).mul(&candidate[k]);
            }
            let cand_rho = RepresentationPoint { images: candidate };
            let cand_res = relator_residual_sq(group, &cand_rho);
            if cand_res < res_sq {
                rho = cand_rho;
                res_sq = cand_res;
                lambda = (lambda * 0.3).max(1e-14);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    if res_sq.sqrt() <= tol {
        Ok(rho)
    } else {
        Err(HolonomyError::NotConverged {
            residual: res_sq.sqrt(),
        })
    }
}

/// Singular values below `cutoff` count as zero; values within a factor 10
/// of the cutoff (either side) make the rank ill-defined.
fn rank_with_gap(svals: &[f64], cutoff: f64) -> Result<usize, HolonomyError> {
    let mut rank = 0;
    for &s in svals {
        if s > cutoff * 10.0 {
            rank += 1;
        } else if s >= cutoff / 10.0 {
            return Err(HolonomyError::RankAmbiguous {
                value: s,
                cutoff,
            });
        }
    }
    Ok(rank)
}

/// Dimension of the representation variety at a solution, modulo
/// conjugation: dim ker(d relators) − rank(infinitesimal conjugation).
///
/// The relator map is differentiated numerically in right-trivialized
/// Lie-algebra directions; both differentials are rank-analyzed by SVD
/// with the cutoff `tol_rank_rel`·(largest singular value overall,
/// floored at 1).
pub fn local_dimension<G: GaugeGroup>(
    group: &PresentedGroup,
    rho: &RepresentationPoint<G>,
    tol_rank_rel: f64,
) -> Result<usize, HolonomyError> {
    let res = relator_residual(group, rho);
    if res > 1e-8 {
        return Err(HolonomyError::NotASolution { residual: res });
    }
    let d = G::ALG_DIM;
    let n = group.generators;
    let h = 1e-5;

    // d2: relator map differential, target trivialized on the right:
    // column (k,a) = log( w(exp(h e_a) g_k …) · w(g)⁻¹ ) / h  (central)
    let rows = group.relators.len() * d;
    let mut d2 = DMatrix::zeros(rows.max(1), n * d);
    for (ri, word) in group.relators.iter().enumerate() {
        let w0_inv = evaluate_word(&rho.images, word).inverse();
        let _ = w0_inv; // right translation below uses each perturbed value
        for k in 0..n {
            for a in 0..d {
                let mut step = vec![0.0; d];
                step[a] = h;
                let mut plus = rho.images.clone();
                plus[k] = G::exp_coords(&step).mul(&plus[k]);
                step[a] = -h;
                let mut minus = rho.images.clone();
                minus[k] = G::exp_coords(&step).mul(&minus[k]);
                let wp = evaluate_word(&plus, word);
                let wm = evaluate_word(&minus, word);
                let mut lp = vec![0.0; d];
                let mut lm = vec![0.0; d];
                wp.mul(&evaluate_word(&rho.images, word).inverse())
                    .log_coords(&mut lp)?;
                wm.mul(&evaluate_word(&rho.images, word).inverse())
                    .log_coords(&mut lm)?;
                for c in 0..d {
                    d2[(ri * d + c, k * d + a)] = (lp[c] - lm[c]) / (2.0 * h);
                }
            }
        }
    }

    // d1: infinitesimal conjugation ξ ↦ (ξ − Ad_{g_k} ξ)_k
    let mut d1 = DMatrix::zeros(n * d, d);
    let mut buf = vec![0.0; d];
    for b in 0..d {
        let mut e = vec![0.0; d];
        e[b] = 1.0;
        for k in 0..n {
            rho.images[k].adjoint_apply(&e, &mut buf);
            for c in 0..d {
                d1[(k * d + c, b)] = e[c] - buf[c];
            }
        }
    }

    let s2 = if group.relators.is_empty() {
        vec![]
    } else {
        d2.svd(false, false).singular_values.as_slice().to_vec()
    };
    let s1 = d1.svd(false, false).singular_values.as_slice().to_vec();
    let smax = s1
        .iter()
        .chain(s2.iter())
        .fold(1.0f64, |m, &x| m.max(x));
    let cutoff = tol_rank_rel * smax;

    let rank2 = rank_with_gap(&s2, cutoff)?;
    let rank1 = rank_with_gap(&s1, cutoff)?;
    let ker2 = n * d - rank2;
    Ok(ker2 - rank1)
}

/// Monodromy report of a flat field on a torus.
#[derive(Debug, Clone)]
pub struct MonodromyReport<G: GaugeGroup> {
    /// Holonomies of the d coordinate loops through the base point.
    pub holonomies: Vec<G>,
    /// ‖[h_μ, h_ν] − 1‖ for μ < ν.
    pub commutator_residuals: Vec<f64>,
    /// Re tr of the generators and of the pairwise products h_μ·h_ν (μ < ν).
    pub generator_traces: Vec<f64>,
    pub pair_traces: Vec<f64>,
}

/// Holonomies of the coordinate generator loops of a flat field on T^d.
///
/// Errors with `NotFlat` when the Wilson energy exceeds `eps_flat`.
pub fn monodromy_torus<G: GaugeGroup>(
    field: &LinkField<G>,
    base: usize,
    eps_flat: f64,
) -> Result<MonodromyReport<G>, HolonomyError> {
    let energy = field.wilson_energy();
    if energy > eps_flat {
        return Err(HolonomyError::NotFlat {
            energy,
            tol: eps_flat,
        });
    }
    let lat = field.lattice().clone();
    let holonomies: Vec<G> = (0..lat.dim())
        .map(|mu| field.transport(&lat.axis_loop(base, mu)))
        .collect::<Result<_, _>>()?;
    let mut commutator_residuals = Vec::new();
    let mut pair_traces = Vec::new();
    for a in 0..holonomies.len() {
        for b in (a + 1)..holonomies.len() {
            let (ha, hb) = (holonomies[a], holonomies[b]);
            let comm = ha.mul(&hb).mul(&ha.inverse()).mul(&hb.inverse());
            commutator_residuals.push(comm.dist_identity_sq().sqrt());
            pair_traces.push(ha.mul(&hb).re_trace());
        }
    }
    let generator_traces = holonomies.iter().map(|h| h.re_trace()).collect();
    Ok(MonodromyReport {
        holonomies,
        commutator_residuals,
        generator_traces,
        pair_traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{field_from_representation, GaugeTransform, LinkField};
    use crate::group::{Su2, Su2Alg, U1};
    use crate::lattice::{LatticePath, TorusLattice};
    use approx::assert_relative_eq;
    use std::sync::Arc;

    #[test]
    fn transport_on_trivial_field_is_identity() {
        let lat = Arc::new(TorusLattice::new(2, &[4, 4]).unwrap());
        let f = LinkField::<Su2>::trivial(lat);
        let path = LatticePath {
            start: 0,
            steps: vec![1, 1, 2, -1, -1, -2],
        };
        assert!(f.transport(&path).unwrap().dist_identity_sq() < 1e-30);
    }

    #[test]
    fn representation_built_field_recovers_monodromy() {
        let lat = Arc::new(TorusLattice::new(2, &[4, 4]).unwrap());
        let h1 = Su2::exp(&Su2Alg::new(0.4, 0.2, 0.0));
        // h2 must commute with h1 for flatness: same axis
        let h2 = Su2::exp(&Su2Alg::new(-0.8, -0.4, 0.0));
        let f = field_from_representation(lat.clone(), &[h1, h2]);
        let rep = monodromy_torus(&f, 0, 1e-12).unwrap();
        assert!(rep.holonomies[0].mul(&h1.inverse()).dist_identity_sq() < 1e-24);
        assert!(rep.holonomies[1].mul(&h2.inverse()).dist_identity_sq() < 1e-24);
        assert!(rep.commutator_residuals.iter().all(|&r| r < 1e-12));

        // transport around one generator loop equals the wrap element
        let loop1 = lat.axis_loop(0, 0);
        let t = f.transport(&loop1).unwrap();
        assert!(t.mul(&h1.inverse()).dist_identity_sq() < 1e-24);
    }

    #[test]
    fn monodromy_requires_flatness() {
        let lat = Arc::new(TorusLattice::new(2, &[4, 4]).unwrap());
        let f = LinkField::<Su2>::random(lat, 3, 0.4);
        assert!(matches!(
            monodromy_torus(&f, 0, 1e-10),
            Err(HolonomyError::NotFlat { .. })
        ));
    }

    #[test]
    fn base_point_change_conjugates_monodromy() {
        let lat = Arc::new(TorusLattice::new(2, &[4, 4]).unwrap());
        let h1 = Su2::exp(&Su2Alg::new(0.0, 0.9, 0.0));
        let h2 = Su2::exp(&Su2Alg::new(0.0, -0.2, 0.0));
        let f = field_from_representation(lat.clone(), &[h1, h2]);
        // scramble with a random gauge so the two base points differ
        let g = GaugeTransform::<Su2>::random(lat.clone(), 8);
        let f = f.apply_gauge(&g).unwrap();
        let a = monodromy_torus(&f, 0, 1e-12).unwrap();
        let b = monodromy_torus(&f, 7, 1e-12).unwrap();
        for (x, y) in a.generator_traces.iter().zip(&b.generator_traces) {
            assert_relative_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn gauge_action_preserves_monodromy_traces() {
        let lat = Arc::new(TorusLattice::new(2, &[5, 5]).unwrap());
        let h1 = Su2::exp(&Su2Alg::new(0.3, 0.0, 0.3));
        let h2 = Su2::exp(&Su2Alg::new(0.6, 0.0, 0.6));
        let f = field_from_representation(lat.clone(), &[h1, h2]);
        let g = GaugeTransform::<Su2>::random(lat, 4);
        let fg = f.apply_gauge(&g).unwrap();
        let a = monodromy_torus(&f, 0, 1e-12).unwrap();
        let b = monodromy_torus(&fg, 0, 1e-12).unwrap();
        for (x, y) in a.generator_traces.iter().zip(&b.generator_traces) {
            assert_relative_eq!(x, y, epsilon = 1e-10);
        }
    }

    #[test]
    fn free_group_returns_start_with_zero_residual() {
        let g = PresentedGroup::free(3);
        let rho = solve_representation::<Su2>(&g, 5, 1e-10, 50).unwrap();
        assert_eq!(rho.images.len(), 3);
        assert_eq!(relator_residual(&g, &rho), 0.0);
    }

    #[test]
    fn torus_group_into_u1_is_satisfied_at_the_start() {
        let g = PresentedGroup::torus();
        // any phase pair satisfies the commutator exactly
        let rho = solve_representation::<U1>(&g, 9, 1e-12, 50).unwrap();
        assert!(relator_residual(&g, &rho) < 1e-12);
    }

    #[test]
    fn genus2_su2_solver_converges() {
        let g = PresentedGroup::surface(2);
        for seed in 0..5 {
            let rho = solve_representation::<Su2>(&g, seed, 1e-10, 400).unwrap();
            let res = relator_residual(&g, &rho);
            assert!(res <= 1e-10, "seed {seed}: {res:.3e}");
            // empirical compactness: SU(2) traces live in [-2, 2]
            for im in &rho.images {
                assert!(im.re_trace().abs() <= 2.0 + 1e-12);
            }
        }
    }

    #[test]
    fn conjugated_solutions_share_invariants() {
        let g = PresentedGroup::surface(2);
        let rho = solve_representation::<Su2>(&g, 3, 1e-10, 400).unwrap();
        let c = Su2::exp(&Su2Alg::new(0.3, 1.0, -0.4));
        let conj = RepresentationPoint {
            images: rho
                .images
                .iter()
                .map(|gk| c.inverse().mul(gk).mul(&c))
                .collect(),
        };
        assert!(relator_residual(&g, &conj) < 1e-10);
        for (a, b) in rho.images.iter().zip(&conj.images) {
            assert_relative_eq!(a.re_trace(), b.re_trace(), epsilon = 1e-10);
        }
    }

    #[test]
    fn torus_u1_dimension_is_two() {
        let g = PresentedGroup::torus();
        let rho = solve_representation::<U1>(&g, 2, 1e-12, 50).unwrap();
        assert_eq!(local_dimension(&g, &rho, 1e-6).unwrap(), 2);
    }

    #[test]
    fn torus_su2_generic_commuting_pair_has_dimension_two() {
        let g = PresentedGroup::torus();
        // generic commuting diagonal pair
        let rho = RepresentationPoint {
            images: vec![
                Su2::exp(&Su2Alg::new(0.7, 0.0, 0.0)),
                Su2::exp(&Su2Alg::new(1.3, 0.0, 0.0)),
            ],
        };
        assert_eq!(local_dimension(&g, &rho, 1e-6).unwrap(), 2);
    }

    /// Pencil-and-paper oracle for the commuting diagonal pair: the relator
    /// differential is D(ξ₁,ξ₂) = (1 − Ad_b)ξ₁ − (1 − Ad_a)ξ₂ and the
    /// conjugation map is ξ ↦ (ξ − Ad_a ξ, ξ − Ad_b ξ). Ad of exp(αe₁) is
    /// the rotation about e₁ by 2α, so both (1 − Ad) matrices kill e₁ and
    /// are invertible on the complement: dim ker D = 4, rank d₁ = 2.
    #[test]
    fn torus_su2_dimension_matches_small_matrix_oracle() {
        let (alpha, beta) = (0.7, 1.3);
        let rot = |t: f64| {
            nalgebra::Matrix3::new(
                1.0,
                0.0,
                0.0,
                0.0,
                t.cos(),
                -t.sin(),
                0.0,
                t.sin(),
                t.cos(),
            )
        };
        let one_minus = |t: f64| nalgebra::Matrix3::identity() - rot(2.0 * t);
        // D as a 3×6 matrix [ (1-Ad_b) | -(1-Ad_a) ]
        let mut d2 = nalgebra::DMatrix::zeros(3, 6);
        d2.view_mut((0, 0), (3, 3)).copy_from(&one_minus(beta));
        d2.view_mut((0, 3), (3, 3)).copy_from(&(-one_minus(alpha)));
        let rank2 = d2
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10)
            .count();
        let mut d1 = nalgebra::DMatrix::zeros(6, 3);
        d1.view_mut((0, 0), (3, 3)).copy_from(&one_minus(alpha));
        d1.view_mut((3, 0), (3, 3)).copy_from(&one_minus(beta));
        let rank1 = d1
            .svd(false, false)
            .singular_values
            .iter()
            .filter(|&&s| s > 1e-10)
            .count();
        assert_eq!(6 - rank2, 4);
        assert_eq!(rank1, 2);
        assert_eq!((6 - rank2) - rank1, 2);
    }

    #[test]
    fn genus2_su2_irreducible_dimension_is_six() {
        let g = PresentedGroup::surface(2);
        let mut checked = 0;
        for seed in [0u64, 1, 2, 3, 4] {
            let rho = solve_representation::<Su2>(&g, seed, 1e-11, 400).unwrap();
            match local_dimension(&g, &rho, 1e-6) {
                Ok(dim) => {
                    assert_eq!(dim, 6, "seed {seed}");
                    checked += 1;
                }
                Err(HolonomyError::RankAmbiguous { .. }) => {
                    // a non-generic (reducible) solution; skip
                }
                Err(e) => panic!("seed {seed}: {e}"),
            }
        }
        assert!(checked >= 3, "too few irreducible solutions found");
    }

    #[test]
    fn homotopy_invariance_across_flat_plaquettes() {
        // two paths differing by one plaquette move: transports differ by at
        // most the plaquette defect
        let lat = Arc::new(TorusLattice::new(2, &[4, 4]).unwrap());
        let f = LinkField::<Su2>::random(lat.clone(), 31, 0.01);
        let p0 = LatticePath {
            start: 0,
            steps: vec![1, 2],
        };
        let p1 = LatticePath {
            start: 0,
            steps: vec![2, 1],
        };
        let t0 = f.transport(&p0).unwrap();
        let t1 = f.transport(&p1).unwrap();
        let plaq = f.plaquette_holonomy(0).unwrap();
        let defect = plaq.dist_identity_sq().sqrt();
        let diff: f64 = t0
            .to_raw()
            .iter()
            .zip(t1.to_raw())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        assert!(diff <= defect + 1e-12, "{diff} vs {defect}");
    }
}
