//! Structure groups U(1) and SU(2) and their Lie algebras.
//!
//! SU(2) elements are stored as unit quaternions q = q0 + q1·i + q2·j + q3·k.
//! The 2×2 complex picture used for traces and determinants is
//!
//!   1 ↦ I,   i ↦ i·σ3,   j ↦ i·σ2,   k ↦ i·σ1,
//!
//! i.e. q = (q0 + i q1, q2 + i q3; -q2 + i q3, q0 - i q1). With this map
//! Re tr = 2·q0 and an algebra vector v = (v1, v2, v3) stands for the
//! imaginary quaternion v1·i + v2·j + v3·k, a traceless anti-Hermitian matrix.
//!
//! U(1) elements are principal angles in (-π, π]; -1 maps to +π by
//! convention so that branch-sensitive sums are deterministic.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GroupError {
    /// Principal logarithm requested within 1e-9 of the antipode q = -1.
    #[error("antipodal element: principal logarithm undefined near q = -1")]
    AntipodalElement,
    /// Input claimed to be a unit complex number deviates from |z| = 1.
    #[error("non-unit complex number: |z| = {norm}")]
    NonUnit { norm: f64 },
}

/// Wrap an angle into the principal branch (-π, π].
pub fn principal_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    // rem_euclid can return exactly 0 for inputs like -2π; keep +π for odd
    // multiples of π so ties are deterministic.
    if x == -PI {
        x = PI;
    }
    x
}

/// Principal argument of a unit complex number, in (-π, π].
///
/// Errors with [`GroupError::NonUnit`] when |z| deviates from 1 by more
/// than 1e-9. The branch cut maps -1 to +π, never -π.
pub fn u1_principal_arg(z: Complex64) -> Result<f64, GroupError> {
    let norm = z.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(GroupError::NonUnit { norm });
    }
    let mut a = z.im.atan2(z.re);
    if a <= -PI {
        a = PI;
    }
    Ok(a)
}

/// Common interface of the two structure groups.
///
/// Algebra elements are passed as coordinate slices of length `ALG_DIM`:
/// the angle for u(1), the imaginary-quaternion vector for su(2).
pub trait GaugeGroup: Copy + Clone + std::fmt::Debug + Send + Sync + 'static {
    const ALG_DIM: usize;
    /// Short tag used in serialized containers ("u1" | "su2").
    const TAG: &'static str;

    fn identity() -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn inverse(&self) -> Self;
    /// Exponential map from algebra coordinates.
    fn exp_coords(v: &[f64]) -> Self;
    /// Principal logarithm into `out`; errors near the branch point.
    fn log_coords(&self, out: &mut [f64]) -> Result<(), GroupError>;
    /// Scalar part: cos θ for U(1), q0 for SU(2). Re tr = 2·scalar.
    fn scalar_part(&self) -> f64;
    /// Imaginary part in algebra coordinates: sin θ for U(1), (q1,q2,q3) for SU(2).
    fn vector_part(&self, out: &mut [f64]);
    /// Adjoint action g·ξ·g⁻¹ on algebra coordinates.
    fn adjoint_apply(&self, v: &[f64], out: &mut [f64]);
    /// Flat serialization of the element (1 angle / 4 quaternion components).
    fn to_raw(&self) -> Vec<f64>;
    fn from_raw(raw: &[f64]) -> Option<Self>;

    /// Squared distance to the identity, ‖1 − g‖² = 2 − 2·scalar.
    ///
    /// For U(1) this is |1 − e^{iθ}|²; for SU(2) the squared quaternion
    /// 4-vector norm of 1 − q. Zero exactly at the identity.
    fn dist_identity_sq(&self) -> f64 {
        2.0 - 2.0 * self.scalar_part()
    }

    /// Re tr in the 2×2 picture (U(1) embeds diagonally): 2·scalar.
    fn re_trace(&self) -> f64 {
        2.0 * self.scalar_part()
    }
}

// ---------------------------------------------------------------------------
// U(1)
// ---------------------------------------------------------------------------

/// A U(1) phase stored as its principal angle in (-π, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct U1 {
    angle: f64,
}

impl U1 {
    pub fn new(angle: f64) -> Self {
        U1 {
            angle: principal_angle(angle),
        }
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.angle)
    }

    /// Integer power, wrapped back into the principal branch.
    pub fn pow(&self, k: i64) -> Self {
        U1::new(self.angle * k as f64)
    }
}

impl GaugeGroup for U1 {
    const ALG_DIM: usize = 1;
    const TAG: &'static str = "u1";

    fn identity() -> Self {
        U1 { angle: 0.0 }
    }

    fn mul(&self, other: &Self) -> Self {
        U1::new(self.angle + other.angle)
    }

    fn inverse(&self) -> Self {
        U1::new(-self.angle)
    }

    fn exp_coords(v: &[f64]) -> Self {
        U1::new(v[0])
    }

    fn log_coords(&self, out: &mut [f64]) -> Result<(), GroupError> {
        if (self.angle.abs() - PI).abs() < 1e-9 {
            return Err(GroupError::AntipodalElement);
        }
        out[0] = self.angle;
        Ok(())
    }

    fn scalar_part(&self) -> f64 {
        self.angle.cos()
    }

    fn vector_part(&self, out: &mut [f64]) {
        out[0] = self.angle.sin();
    }

    fn adjoint_apply(&self, v: &[f64], out: &mut [f64]) {
        out[0] = v[0]; // abelian
    }

    fn to_raw(&self) -> Vec<f64> {
        vec![self.angle]
    }

    fn from_raw(raw: &[f64]) -> Option<Self> {
        if raw.len() == 1 && raw[0].is_finite() {
            Some(U1::new(raw[0]))
        } else {
            None
        }
    }
}

// ---------------------------------------------------------------------------
// su(2) algebra
// ---------------------------------------------------------------------------

/// An su(2) element: the imaginary quaternion v1·i + v2·j + v3·k.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Su2Alg {
    pub v: [f64; 3],
}

impl Su2Alg {
    pub fn new(v1: f64, v2: f64, v3: f64) -> Self {
        Su2Alg { v: [v1, v2, v3] }
    }

    pub fn zero() -> Self {
        Su2Alg { v: [0.0; 3] }
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Su2Alg) -> f64 {
        self.v[0] * other.v[0] + self.v[1] * other.v[1] + self.v[2] * other.v[2]
    }

    pub fn scale(&self, s: f64) -> Su2Alg {
        Su2Alg::new(self.v[0] * s, self.v[1] * s, self.v[2] * s)
    }

    pub fn add(&self, other: &Su2Alg) -> Su2Alg {
        Su2Alg::new(
            self.v[0] + other.v[0],
            self.v[1] + other.v[1],
            self.v[2] + other.v[2],
        )
    }

    pub fn sub(&self, other: &Su2Alg) -> Su2Alg {
        Su2Alg::new(
            self.v[0] - other.v[0],
            self.v[1] - other.v[1],
            self.v[2] - other.v[2],
        )
    }

    /// Lie bracket [ξ, η] = ξη − ηξ. For imaginary quaternions this is
    /// twice the cross product of the coordinate vectors.
    pub fn bracket(&self, other: &Su2Alg) -> Su2Alg {
        Su2Alg::new(
            2.0 * (self.v[1] * other.v[2] - self.v[2] * other.v[1]),
            2.0 * (self.v[2] * other.v[0] - self.v[0] * other.v[2]),
            2.0 * (self.v[0] * other.v[1] - self.v[1] * other.v[0]),
        )
    }

    /// The 2×2 matrix of this algebra element under the quaternion picture.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        let (v1, v2, v3) = (self.v[0], self.v[1], self.v[2]);
        [
            [Complex64::new(0.0, v1), Complex64::new(v2, v3)],
            [Complex64::new(-v2, v3), Complex64::new(0.0, -v1)],
        ]
    }

    /// det of the 2×2 matrix picture.
    pub fn det(&self) -> f64 {
        // exact: det = v1² + v2² + v3² for imaginary quaternions
        let m = self.to_matrix();
        (m[0][0] * m[1][1] - m[0][1] * m[1][0]).re
    }

    /// tr(ξ²) computed through the 2×2 matrix picture.
    ///
    /// Equals -2·det(ξ) = -2·|v|² for every ξ.
    pub fn trace_square(&self) -> f64 {
        let m = self.to_matrix();
        let mut tr = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for k in 0..2 {
                tr += m[i][k] * m[k][i];
            }
        }
        tr.re
    }

    /// tr(ξη) = -2·⟨v, w⟩.
    pub fn trace_product(&self, other: &Su2Alg) -> f64 {
        -2.0 * self.dot(other)
    }
}

// ---------------------------------------------------------------------------
// SU(2)
// ---------------------------------------------------------------------------

/// An SU(2) element stored as a unit quaternion.
///
/// Renormalized on construction and after every product so that long
/// plaquette and path products cannot drift off the group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Su2 {
    q: [f64; 4],
}

impl Su2 {
    pub fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Su2 {
            q: [q0, q1, q2, q3],
        }
        .normalized()
    }

    pub fn q(&self) -> [f64; 4] {
        self.q
    }

    fn normalized(mut self) -> Self {
        let n = (self.q[0] * self.q[0]
            + self.q[1] * self.q[1]
            + self.q[2] * self.q[2]
            + self.q[3] * self.q[3])
            .sqrt();
        debug_assert!(n > 1e-30, "zero quaternion");
        for c in &mut self.q {
            *c /= n;
        }
        self
    }

    /// Quaternion product without the unit-norm projection. Used internally
    /// where one factor is an algebra element.
    pub(crate) fn raw_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
        [
            a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
            a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
            a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
            a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
        ]
    }

    /// exp of an algebra element: cos|v| + sin|v|·v̂.
    pub fn exp(xi: &Su2Alg) -> Su2 {
        let t = xi.norm();
        if t < 1e-12 {
            // 4th-order small-angle series keeps the round trip exact to
            // machine precision near the identity.
            let c = 1.0 - t * t / 2.0;
            let s = 1.0 - t * t / 6.0;
            Su2::new(c, s * xi.v[0], s * xi.v[1], s * xi.v[2])
        } else {
            let s = t.sin() / t;
            Su2::new(t.cos(), s * xi.v[0], s * xi.v[1], s * xi.v[2])
        }
    }

    /// Principal logarithm, |result| < π.
    ///
    /// Errors with [`GroupError::AntipodalElement`] within 1e-9 of q = -1,
    /// where the axis is undefined.
    pub fn log(&self) -> Result<Su2Alg, GroupError> {
        let vn = (self.q[1] * self.q[1] + self.q[2] * self.q[2] + self.q[3] * self.q[3]).sqrt();
        if self.q[0] < 0.0 && vn < 1e-9 {
            return Err(GroupError::AntipodalElement);
        }
        if vn < 1e-12 {
            // assume q0 ≈ +1: log ≈ vector part to machine precision
            return Ok(Su2Alg::new(self.q[1], self.q[2], self.q[3]));
        }
        let t = vn.atan2(self.q[0]);
        let f = t / vn;
        Ok(Su2Alg::new(f * self.q[1], f * self.q[2], f * self.q[3]))
    }

    /// The 2×2 unitary matrix of this element.
    pub fn to_matrix(&self) -> [[Complex64; 2]; 2] {
        let [q0, q1, q2, q3] = self.q;
        [
            [Complex64::new(q0, q1), Complex64::new(q2, q3)],
            [Complex64::new(-q2, q3), Complex64::new(q0, -q1)],
        ]
    }

    /// Geodesic distance to another element on S³, in [0, π].
    pub fn angle_to(&self, other: &Su2) -> f64 {
        let d = Su2::raw_mul(&self.inverse().q, &other.q);
        let vn = (d[1] * d[1] + d[2] * d[2] + d[3] * d[3]).sqrt();
        vn.atan2(d[0])
    }

    /// Left-multiply by an algebra element: ξ·q as a raw (non-unit) quaternion.
    pub fn alg_mul(xi: &Su2Alg, g: &Su2) -> [f64; 4] {
        Su2::raw_mul(&[0.0, xi.v[0], xi.v[1], xi.v[2]], &g.q)
    }
}

impl GaugeGroup for Su2 {
    const ALG_DIM: usize = 3;
    const TAG: &'static str = "su2";

    fn identity() -> Self {
        Su2 {
            q: [1.0, 0.0, 0.0, 0.0],
        }
    }

    fn mul(&self, other: &Self) -> Self {
        Su2 {
            q: Su2::raw_mul(&self.q, &other.q),
        }
        .normalized()
    }

    fn inverse(&self) -> Self {
        Su2 {
            q: [self.q[0], -self.q[1], -self.q[2], -self.q[3]],
        }
    }

    fn exp_coords(v: &[f64]) -> Self {
        Su2::exp(&Su2Alg::new(v[0], v[1], v[2]))
    }

    fn log_coords(&self, out: &mut [f64]) -> Result<(), GroupError> {
        let xi = self.log()?;
        out.copy_from_slice(&xi.v);
        Ok(())
    }

    fn scalar_part(&self) -> f64 {
        self.q[0]
    }

    fn vector_part(&self, out: &mut [f64]) {
        out.copy_from_slice(&self.q[1..4]);
    }

    fn adjoint_apply(&self, v: &[f64], out: &mut [f64]) {
        // q·ξ·q̄ for the imaginary quaternion ξ
        let xi = [0.0, v[0], v[1], v[2]];
        let r = Su2::raw_mul(&Su2::raw_mul(&self.q, &xi), &self.inverse().q);
        out.copy_from_slice(&r[1..4]);
    }

    fn to_raw(&self) -> Vec<f64> {
        self.q.to_vec()
    }

    fn from_raw(raw: &[f64]) -> Option<Self> {
        if raw.len() == 4 && raw.iter().all(|x| x.is_finite()) {
            let n = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (n - 1.0).abs() > 1e-6 {
                return None;
            }
            Some(Su2::new(raw[0], raw[1], raw[2], raw[3]))
        } else {
            None
        }
    }
}

/// Runtime tag for the two structure groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupTag {
    U1,
    Su2,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_su2(rng: &mut ChaCha8Rng) -> Su2 {
        Su2::new(
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        )
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let q = Su2::exp(&Su2Alg::zero());
        assert_eq!(q.q(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn exp_pi_axis_is_minus_one() {
        let q = Su2::exp(&Su2Alg::new(std::f64::consts::PI, 0.0, 0.0));
        assert_relative_eq!(q.q()[0], -1.0, epsilon = 1e-15);
        assert!(q.q()[1].abs() < 1e-15);
    }

    #[test]
    fn log_of_identity_is_zero() {
        assert_eq!(Su2::identity().log().unwrap(), Su2Alg::zero());
    }

    #[test]
    fn log_exp_round_trip() {
        let xi = Su2Alg::new(0.3, 0.0, 0.0);
        let back = Su2::exp(&xi).log().unwrap();
        assert_relative_eq!(back.v[0], 0.3, epsilon = 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let dir: [f64; 3] = [
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
                rng.gen::<f64>() - 0.5,
            ];
            let n = (dir.iter().map(|x| x * x).sum::<f64>()).sqrt();
            let r = rng.gen::<f64>() * (std::f64::consts::PI - 0.01);
            let xi = Su2Alg::new(dir[0] / n * r, dir[1] / n * r, dir[2] / n * r);
            let back = Su2::exp(&xi).log().unwrap();
            assert!(back.sub(&xi).norm() < 1e-10, "{:?} vs {:?}", xi, back);
        }
    }

    #[test]
    fn log_rejects_antipode() {
        let q = Su2::new(-1.0, 0.0, 0.0, 0.0);
        assert_eq!(q.log(), Err(GroupError::AntipodalElement));
        let close = Su2::new(-1.0, 1e-12, 0.0, 0.0);
        assert_eq!(close.log(), Err(GroupError::AntipodalElement));
    }

    #[test]
    fn trace_square_matches_matrix_identities() {
        // ξ = i, i.e. diag(i, -i) in the matrix picture
        let xi = Su2Alg::new(1.0, 0.0, 0.0);
        assert_relative_eq!(xi.trace_square(), -2.0, epsilon = 1e-15);
        assert_relative_eq!(xi.det(), 1.0, epsilon = 1e-15);

        assert_eq!(Su2Alg::zero().trace_square(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let xi = Su2Alg::new(
                4.0 * (rng.gen::<f64>() - 0.5),
                4.0 * (rng.gen::<f64>() - 0.5),
                4.0 * (rng.gen::<f64>() - 0.5),
            );
            let ts = xi.trace_square();
            assert!((ts + 2.0 * xi.det()).abs() < 1e-12);
            assert!((ts + 2.0 * xi.dot(&xi)).abs() < 1e-12);
        }
    }

    #[test]
    fn principal_arg_branch() {
        assert_eq!(u1_principal_arg(Complex64::new(1.0, 0.0)).unwrap(), 0.0);
        assert_eq!(
            u1_principal_arg(Complex64::new(-1.0, 0.0)).unwrap(),
            std::f64::consts::PI
        );
        assert_eq!(
            u1_principal_arg(Complex64::new(-1.0, -0.0)).unwrap(),
            std::f64::consts::PI
        );
        let z = Complex64::from_polar(1.0, 0.7);
        assert_relative_eq!(u1_principal_arg(z).unwrap(), 0.7, epsilon = 1e-12);
        assert!(matches!(
            u1_principal_arg(Complex64::new(0.5, 0.0)),
            Err(GroupError::NonUnit { .. })
        ));
    }

    #[test]
    fn group_axioms_hold_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let (a, b, c) = (random_su2(&mut rng), random_su2(&mut rng), random_su2(&mut rng));
            let left = a.mul(&b).mul(&c);
            let right = a.mul(&b.mul(&c));
            for k in 0..4 {
                assert!((left.q()[k] - right.q()[k]).abs() < 1e-12);
            }
            let e = a.mul(&a.inverse());
            assert!(e.dist_identity_sq() < 1e-24);
            let n: f64 = a.q().iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn clifford_identity_for_imaginary_quaternions() {
        // h·(h·v) = -|h|² v for h ∈ Im(H), v ∈ H
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let h = [
                0.0,
                2.0 * (rng.gen::<f64>() - 0.5),
                2.0 * (rng.gen::<f64>() - 0.5),
                2.0 * (rng.gen::<f64>() - 0.5),
            ];
            let v = [
                2.0 * (rng.gen::<f64>() - 0.5),
                2.0 * (rng.gen::<f64>() - 0.5),
                2.0 * (rng.gen::<f64>() - 0.5),
                2.0 * (rng.gen::<f64>() - 0.5),
            ];
            let hv = Su2::raw_mul(&h, &v);
            let hhv = Su2::raw_mul(&h, &hv);
            let h2 = h[1] * h[1] + h[2] * h[2] + h[3] * h[3];
            for k in 0..4 {
                assert!((hhv[k] + h2 * v[k]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn u1_wraps_into_principal_branch() {
        let a = U1::new(3.0 * std::f64::consts::PI);
        assert_relative_eq!(a.angle(), std::f64::consts::PI, epsilon = 1e-12);
        let b = U1::new(-std::f64::consts::PI);
        assert_eq!(b.angle(), std::f64::consts::PI);
        let c = U1::new(2.5).mul(&U1::new(2.5));
        assert!(c.angle() > -std::f64::consts::PI && c.angle() <= std::f64::consts::PI);
        assert_relative_eq!(c.angle(), 5.0 - 2.0 * std::f64::consts::PI, epsilon = 1e-12);
    }
}
