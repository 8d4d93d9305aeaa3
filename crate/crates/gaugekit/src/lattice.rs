//! Cubical lattice tori T^d for d = 2, 3, 4.
//!
//! Sites are ordered lexicographically with the first coordinate fastest,
//! so enumerations are stable across runs. An edge is (site, direction μ),
//! a plaquette is (site, plane μ<ν), a cube is (site, triple μ<ν<ρ); cell
//! indices are site-major in those orderings.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LatticeError {
    #[error("dimension {0} not supported (need 2, 3 or 4)")]
    BadDimension(usize),
    #[error("axis extent {0} too small (need at least 2)")]
    BadSize(usize),
    #[error("cell index {index} out of range {limit}")]
    BadIndex { index: usize, limit: usize },
}

/// Descriptor of a torus lattice (shape only, no field data).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusLattice {
    dim: usize,
    sizes: Vec<usize>,
}

/// One lattice edge traversed with a sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedEdge {
    pub site: usize,
    pub dir: usize,
    pub positive: bool,
}

/// A path: start site plus a sequence of signed axis steps.
/// Step `+ (μ+1)` moves along +μ̂, `-(μ+1)` along -μ̂.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticePath {
    pub start: usize,
    pub steps: Vec<i32>,
}

impl TorusLattice {
    pub fn new(dim: usize, sizes: &[usize]) -> Result<Self, LatticeError> {
        if !(2..=4).contains(&dim) || sizes.len() != dim {
            return Err(LatticeError::BadDimension(if sizes.len() != dim {
                sizes.len()
            } else {
                dim
            }));
        }
        for &n in sizes {
            if n < 2 {
                return Err(LatticeError::BadSize(n));
            }
        }
        Ok(TorusLattice {
            dim,
            sizes: sizes.to_vec(),
        })
    }

    /// Hypercubic torus with equal extent on every axis.
    pub fn hypercubic(dim: usize, n: usize) -> Result<Self, LatticeError> {
        TorusLattice::new(dim, &vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn n_sites(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn n_edges(&self) -> usize {
        self.dim * self.n_sites()
    }

    pub fn n_planes(&self) -> usize {
        self.dim * (self.dim - 1) / 2
    }

    pub fn n_plaquettes(&self) -> usize {
        self.n_planes() * self.n_sites()
    }

    pub fn n_triples(&self) -> usize {
        match self.dim {
            3 => 1,
            4 => 4,
            _ => 0,
        }
    }

    pub fn n_cubes(&self) -> usize {
        self.n_triples() * self.n_sites()
    }

    /// Plane index of the ordered pair μ < ν (lexicographic).
    pub fn plane_index(&self, mu: usize, nu: usize) -> usize {
        debug_assert!(mu < nu && nu < self.dim);
        let mut idx = 0;
        for a in 0..self.dim {
            for b in (a + 1)..self.dim {
                if (a, b) == (mu, nu) {
                    return idx;
                }
                idx += 1;
            }
        }
        unreachable!()
    }

    /// Axis pair of a plane index.
    pub fn plane_axes(&self, plane: usize) -> (usize, usize) {
        let mut idx = 0;
        for a in 0..self.dim {
            for b in (a + 1)..self.dim {
                if idx == plane {
                    return (a, b);
                }
                idx += 1;
            }
        }
        panic!("plane index {plane} out of range");
    }

    fn triple_axes(&self, t: usize) -> (usize, usize, usize) {
        let mut idx = 0;
        for a in 0..self.dim {
            for b in (a + 1)..self.dim {
                for c in (b + 1)..self.dim {
                    if idx == t {
                        return (a, b, c);
                    }
                    idx += 1;
                }
            }
        }
        panic!("triple index {t} out of range");
    }

    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut c = Vec::with_capacity(self.dim);
        let mut rest = site;
        for &n in &self.sizes {
            c.push(rest % n);
            rest /= n;
        }
        c
    }

    pub fn site(&self, coords: &[usize]) -> usize {
        let mut idx = 0;
        for mu in (0..self.dim).rev() {
            idx = idx * self.sizes[mu] + coords[mu] % self.sizes[mu];
        }
        idx
    }

    /// Neighbouring site one step along ±μ̂, with periodic wrap.
    pub fn shift(&self, site: usize, mu: usize, forward: bool) -> usize {
        let mut c = self.coords(site);
        let n = self.sizes[mu];
        c[mu] = if forward {
            (c[mu] + 1) % n
        } else {
            (c[mu] + n - 1) % n
        };
        self.site(&c)
    }

    pub fn edge_index(&self, site: usize, mu: usize) -> usize {
        site * self.dim + mu
    }

    pub fn plaquette_index(&self, site: usize, plane: usize) -> usize {
        site * self.n_planes() + plane
    }

    pub fn plaquette_site_plane(&self, p: usize) -> Result<(usize, usize), LatticeError> {
        if p >= self.n_plaquettes() {
            return Err(LatticeError::BadIndex {
                index: p,
                limit: self.n_plaquettes(),
            });
        }
        Ok((p / self.n_planes(), p % self.n_planes()))
    }

    /// The four signed edges of a plaquette, traversed counterclockwise:
    /// +μ at x, +ν at x+μ̂, -μ at x+ν̂, -ν at x.
    pub fn plaquette_boundary(&self, p: usize) -> Result<[SignedEdge; 4], LatticeError> {
        let (x, plane) = self.plaquette_site_plane(p)?;
        let (mu, nu) = self.plane_axes(plane);
        let x_mu = self.shift(x, mu, true);
        let x_nu = self.shift(x, nu, true);
        Ok([
            SignedEdge {
                site: x,
                dir: mu,
                positive: true,
            },
            SignedEdge {
                site: x_mu,
                dir: nu,
                positive: true,
            },
            SignedEdge {
                site: x_nu,
                dir: mu,
                positive: false,
            },
            SignedEdge {
                site: x,
                dir: nu,
                positive: false,
            },
        ])
    }

    /// Boundary as a closed path based at the plaquette corner.
    pub fn plaquette_loop(&self, p: usize) -> Result<LatticePath, LatticeError> {
        let (x, plane) = self.plaquette_site_plane(p)?;
        let (mu, nu) = self.plane_axes(plane);
        let (m, n) = (mu as i32 + 1, nu as i32 + 1);
        Ok(LatticePath {
            start: x,
            steps: vec![m, n, -m, -n],
        })
    }

    /// The six faces of a 3-cell with induced orientation signs.
    ///
    /// Signs are chosen so that every cube edge appears exactly twice with
    /// opposite signs across the six signed face boundaries (∂∂ = 0).
    pub fn cube_faces(&self, c: usize) -> Result<[(usize, i32); 6], LatticeError> {
        if self.dim < 3 {
            return Err(LatticeError::BadDimension(self.dim));
        }
        if c >= self.n_cubes() {
            return Err(LatticeError::BadIndex {
                index: c,
                limit: self.n_cubes(),
            });
        }
        let (x, t) = (c / self.n_triples(), c % self.n_triples());
        let (mu, nu, rho) = self.triple_axes(t);
        let planes = [
            self.plane_index(nu, rho), // opposite the μ axis
            self.plane_index(mu, rho), // opposite the ν axis
            self.plane_index(mu, nu),  // opposite the ρ axis
        ];
        let axes = [mu, nu, rho];
        let mut faces = [(0usize, 0i32); 6];
        for (k, (&axis, &plane)) in axes.iter().zip(planes.iter()).enumerate() {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            let far = self.shift(x, axis, true);
            faces[2 * k] = (self.plaquette_index(far, plane), sign);
            faces[2 * k + 1] = (self.plaquette_index(x, plane), -sign);
        }
        Ok(faces)
    }

    /// Walk a signed step from a site; errors if the direction is invalid.
    pub fn step(&self, site: usize, step: i32) -> Result<(usize, SignedEdge), LatticeError> {
        let mu = step.unsigned_abs() as usize;
        if step == 0 || mu > self.dim {
            return Err(LatticeError::BadIndex {
                index: mu,
                limit: self.dim,
            });
        }
        let mu = mu - 1;
        if step > 0 {
            let edge = SignedEdge {
                site,
                dir: mu,
                positive: true,
            };
            Ok((self.shift(site, mu, true), edge))
        } else {
            let prev = self.shift(site, mu, false);
            let edge = SignedEdge {
                site: prev,
                dir: mu,
                positive: false,
            };
            Ok((prev, edge))
        }
    }

    /// The loop winding once around axis μ from a base site.
    pub fn axis_loop(&self, base: usize, mu: usize) -> LatticePath {
        LatticePath {
            start: base,
            steps: vec![mu as i32 + 1; self.sizes[mu]],
        }
    }
}
