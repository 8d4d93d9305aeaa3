//! Lattice connections: link fields, gauge transformations, plaquette
//! holonomy and the Wilson energy.
//!
//! A link field stores one group element per positively oriented edge; the
//! value on a reversed edge is the inverse of the stored value. Path
//! products multiply left to right, so the plaquette holonomy based at x
//! in the (μ,ν) plane is the Wilson product
//! U_μ(x)·U_ν(x+μ̂)·U_μ(x+ν̂)⁻¹·U_ν(x)⁻¹.

use crate::group::{GaugeGroup, Su2Alg, U1};
use crate::lattice::{LatticeError, LatticePath, SignedEdge, TorusLattice};
use crate::par;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("mismatched lattice: {0:?} vs {1:?}")]
    MismatchedLattice(Vec<usize>, Vec<usize>),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("field container: {0}")]
    BadContainer(String),
}

/// A discrete connection: one group element per positively oriented edge.
#[derive(Debug, Clone)]
pub struct LinkField<G: GaugeGroup> {
    lat: Arc<TorusLattice>,
    links: Vec<G>,
}

/// A vertex-wise change of frame.
#[derive(Debug, Clone)]
pub struct GaugeTransform<G: GaugeGroup> {
    lat: Arc<TorusLattice>,
    values: Vec<G>,
}

impl<G: GaugeGroup> GaugeTransform<G> {
    pub fn identity(lat: Arc<TorusLattice>) -> Self {
        let values = vec![G::identity(); lat.n_sites()];
        GaugeTransform { lat, values }
    }

    pub fn random(lat: Arc<TorusLattice>, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..lat.n_sites())
            .map(|_| G::exp_coords(&ball_sample(&mut rng, G::ALG_DIM, std::f64::consts::PI)))
            .collect();
        GaugeTransform { lat, values }
    }

    pub fn from_values(lat: Arc<TorusLattice>, values: Vec<G>) -> Self {
        assert_eq!(values.len(), lat.n_sites());
        GaugeTransform { lat, values }
    }

    pub fn value(&self, site: usize) -> G {
        self.values[site]
    }

    pub fn lattice(&self) -> &Arc<TorusLattice> {
        &self.lat
    }
}

/// Uniform sample from the closed ball of the given radius in R^dim.
pub(crate) fn ball_sample(rng: &mut ChaCha8Rng, dim: usize, radius: f64) -> Vec<f64> {
    if radius == 0.0 {
        return vec![0.0; dim];
    }
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            return v.into_iter().map(|x| x * radius).collect();
        }
    }
}

impl<G: GaugeGroup> LinkField<G> {
    /// All links at the identity: the trivial (flat) connection.
    pub fn trivial(lat: Arc<TorusLattice>) -> Self {
        let links = vec![G::identity(); lat.n_edges()];
        LinkField { lat, links }
    }

    /// Links exp(ξ) with ξ i.i.d. uniform in the ball of the given radius.
    /// Deterministic for a fixed seed.
    pub fn random(lat: Arc<TorusLattice>, seed: u64, roughness: f64) -> Self {
        assert!(roughness >= 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links = (0..lat.n_edges())
            .map(|_| G::exp_coords(&ball_sample(&mut rng, G::ALG_DIM, roughness)))
            .collect();
        LinkField { lat, links }
    }

    pub fn from_links(lat: Arc<TorusLattice>, links: Vec<G>) -> Self {
        assert_eq!(links.len(), lat.n_edges());
        LinkField { lat, links }
    }

    pub fn lattice(&self) -> &Arc<TorusLattice> {
        &self.lat
    }

    pub fn links(&self) -> &[G] {
        &self.links
    }

    pub fn link(&self, site: usize, mu: usize) -> G {
        self.links[self.lat.edge_index(site, mu)]
    }

    pub fn set_link(&mut self, site: usize, mu: usize, value: G) {
        let e = self.lat.edge_index(site, mu);
        self.links[e] = value;
    }

    /// Value of a signed edge: the stored element, or its inverse on a
    /// reversed traversal.
    pub fn signed_link(&self, e: &SignedEdge) -> G {
        let u = self.link(e.site, e.dir);
        if e.positive {
            u
        } else {
            u.inverse()
        }
    }

    /// Ordered product of the signed links along a path.
    ///
    /// Factors multiply left to right, so under a gauge transform the
    /// product telescopes to g(start)⁻¹·T·g(end) and loop holonomies
    /// conjugate at the base point. Viewing T as acting on row vectors,
    /// transport along p·q is transport(q) ∘ transport(p).
    pub fn transport(&self, path: &LatticePath) -> Result<G, LatticeError> {
        let mut acc = G::identity();
        let mut site = path.start;
        for &s in &path.steps {
            let (next, edge) = self.lat.step(site, s)?;
            acc = acc.mul(&self.signed_link(&edge));
            site = next;
        }
        Ok(acc)
    }

    /// Holonomy around a plaquette, based at its corner site.
    pub fn plaquette_holonomy(&self, p: usize) -> Result<G, LatticeError> {
        let loop_path = self.lat.plaquette_loop(p)?;
        self.transport(&loop_path)
    }

    /// Σ_p ‖1 − U_p‖² over all plaquettes. Gauge invariant; zero exactly
    /// when every plaquette holonomy is the identity.
    pub fn wilson_energy(&self) -> f64 {
        par::ordered_sum(self.lat.n_plaquettes(), |p| {
            self.plaquette_holonomy(p).unwrap().dist_identity_sq()
        })
    }

    /// U'(x,μ) = g(x)⁻¹ · U(x,μ) · g(x+μ̂).
    pub fn apply_gauge(&self, g: &GaugeTransform<G>) -> Result<LinkField<G>, FieldError> {
        if g.lat != self.lat {
            return Err(FieldError::MismatchedLattice(
                self.lat.sizes().to_vec(),
                g.lat.sizes().to_vec(),
            ));
        }
        let lat = self.lat.clone();
        let links = par::ordered_map(lat.n_edges(), |e| {
            let (site, mu) = (e / lat.dim(), e % lat.dim());
            let head = lat.shift(site, mu, true);
            g.value(site)
                .inverse()
                .mul(&self.links[e])
                .mul(&g.value(head))
        });
        Ok(LinkField { lat, links })
    }
}

impl LinkField<U1> {
    /// Principal angles of all plaquette holonomies, in plaquette order.
    pub fn plaquette_angles(&self) -> Vec<f64> {
        par::ordered_map(self.lat.n_plaquettes(), |p| {
            self.plaquette_holonomy(p).unwrap().angle()
        })
    }

    /// Constant-flux field on T² with total flux 2πm.
    ///
    /// With f = 2πm/N², links are U(x,2) = exp(i f x₁) and U(x,1) = 1
    /// except on the seam x₁ = N-1 where U(x,1) = exp(-i f N x₂). Every
    /// plaquette then carries the angle f exactly; c₁ = m.
    pub fn constant_flux_t2(n: usize, m: i64) -> Result<Self, LatticeError> {
        let lat = Arc::new(TorusLattice::new(2, &[n, n])?);
        let mut field = LinkField::trivial(lat.clone());
        apply_plane_flux(&mut field, 0, 1, m);
        Ok(field)
    }

    /// Constant-flux field on T⁴ (size n per axis) with integer fluxes
    /// m[μ][ν] on the (μ,ν) planes. The matrix must be antisymmetric.
    pub fn constant_flux_t4(n: usize, m: &[[i64; 4]; 4]) -> Result<Self, LatticeError> {
        let lat = Arc::new(TorusLattice::new(4, &[n, n, n, n])?);
        let mut field = LinkField::trivial(lat.clone());
        for mu in 0..4 {
            for nu in (mu + 1)..4 {
                if m[mu][nu] != 0 {
                    apply_plane_flux(&mut field, mu, nu, m[mu][nu]);
                }
            }
        }
        Ok(field)
    }
}

/// Multiply the 2D constant-flux construction for one (μ,ν) plane into an
/// existing U(1) field: U(x,ν) ← U(x,ν)·exp(i f x_μ), and on the seam
/// x_μ = N-1: U(x,μ) ← U(x,μ)·exp(-i f N x_ν), with f = 2πm/N².
fn apply_plane_flux(field: &mut LinkField<U1>, mu: usize, nu: usize, m: i64) {
    let lat = field.lattice().clone();
    let n = lat.sizes()[mu];
    debug_assert_eq!(n, lat.sizes()[nu]);
    let f = TAU * m as f64 / (n * n) as f64;
    for site in 0..lat.n_sites() {
        let c = lat.coords(site);
        let u = field.link(site, nu).mul(&U1::new(f * c[mu] as f64));
        field.set_link(site, nu, u);
        if c[mu] == n - 1 {
            let u = field
                .link(site, mu)
                .mul(&U1::new(-f * (n as f64) * c[nu] as f64));
            field.set_link(site, mu, u);
        }
    }
}

/// Flat field whose monodromy along axis μ is the given element h_μ:
/// the holonomy is concentrated on the wrap links x_μ = N_μ - 1.
///
/// The elements must commute pairwise for the result to be flat (π₁ of the
/// torus is abelian).
pub fn field_from_representation<G: GaugeGroup>(
    lat: Arc<TorusLattice>,
    holonomies: &[G],
) -> LinkField<G> {
    assert_eq!(holonomies.len(), lat.dim());
    let mut field = LinkField::trivial(lat.clone());
    for site in 0..lat.n_sites() {
        let c = lat.coords(site);
        for mu in 0..lat.dim() {
            if c[mu] == lat.sizes()[mu] - 1 {
                field.set_link(site, mu, holonomies[mu]);
            }
        }
    }
    field
}

/// Multiply each link by exp(ξ) with ξ uniform in the ball of the given
/// radius; used to perturb fields off a known configuration.
pub fn perturb_links<G: GaugeGroup>(field: &LinkField<G>, seed: u64, radius: f64) -> LinkField<G> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let links = field
        .links()
        .iter()
        .map(|u| G::exp_coords(&ball_sample(&mut rng, G::ALG_DIM, radius)).mul(u))
        .collect();
    LinkField::from_links(field.lattice().clone(), links)
}

/// Sample a smooth SU(2) link field from an analytic connection 1-form:
/// U_μ(x) = exp(h·A_μ(h·(x + μ̂/2))) for lattice spacing h (midpoint rule).
pub fn sample_su2_connection(
    lat: Arc<TorusLattice>,
    spacing: f64,
    a: impl Fn(usize, &[f64]) -> Su2Alg + Sync + Send,
) -> LinkField<crate::group::Su2> {
    let links = par::ordered_map(lat.n_edges(), |e| {
        let (site, mu) = (e / lat.dim(), e % lat.dim());
        let mut pos: Vec<f64> = lat
            .coords(site)
            .iter()
            .map(|&c| c as f64 * spacing)
            .collect();
        pos[mu] += 0.5 * spacing;
        crate::group::Su2::exp(&a(mu, &pos).scale(spacing))
    });
    LinkField::from_links(lat, links)
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

/// Versioned JSON container for link fields. Links are stored in canonical
/// edge order (site-major, direction fastest).
#[derive(Debug, Serialize, Deserialize)]
pub struct FieldContainer {
    pub version: u32,
    pub lattice: TorusLattice,
    pub group: String,
    pub links: Vec<Vec<f64>>,
}

impl<G: GaugeGroup> LinkField<G> {
    pub fn to_container(&self) -> FieldContainer {
        FieldContainer {
            version: 1,
            lattice: (*self.lat).clone(),
            group: G::TAG.to_string(),
            links: self.links.iter().map(|u| u.to_raw()).collect(),
        }
    }

    pub fn from_container(c: &FieldContainer) -> Result<Self, FieldError> {
        if c.version != 1 {
            return Err(FieldError::BadContainer(format!(
                "unsupported version {}",
                c.version
            )));
        }
        if c.group != G::TAG {
            return Err(FieldError::BadContainer(format!(
                "group tag {} does not match {}",
                c.group,
                G::TAG
            )));
        }
        let lat = Arc::new(c.lattice.clone());
        if c.links.len() != lat.n_edges() {
            return Err(FieldError::BadContainer(format!(
                "expected {} links, found {}",
                lat.n_edges(),
                c.links.len()
            )));
        }
        let mut links = Vec::with_capacity(c.links.len());
        for raw in &c.links {
            links.push(
                G::from_raw(raw).ok_or_else(|| FieldError::BadContainer("bad link".into()))?,
            );
        }
        Ok(LinkField { lat, links })
    }
}
