//! Fourth order, four dimensional Hankel tensors and their quartic forms.
//!
//! A Hankel tensor of this shape is fixed by its generating vector
//! `v = (v0, ..., v12)`: the entry at `(i1, i2, i3, i4)` is `v[i1+i2+i3+i4-4]`
//! (1-based indices). The associated polynomial is
//! `f(x) = sum v[i1+i2+i3+i4-4] x_i1 x_i2 x_i3 x_i4`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{HankelError, Result};

/// Number of degree-4 monomials in four variables.
pub const N_QUARTIC: usize = 35;

const fn build_quartic_exponents() -> [[u8; 4]; N_QUARTIC] {
    let mut out = [[0u8; 4]; N_QUARTIC];
    let mut n = 0;
    let mut a1 = 4i32;
    while a1 >= 0 {
        let mut a2 = 4 - a1;
        while a2 >= 0 {
            let mut a3 = 4 - a1 - a2;
            while a3 >= 0 {
                let a4 = 4 - a1 - a2 - a3;
                out[n] = [a1 as u8, a2 as u8, a3 as u8, a4 as u8];
                n += 1;
                a3 -= 1;
            }
            a2 -= 1;
        }
        a1 -= 1;
    }
    out
}

/// Exponents of the 35 quartic monomials, graded lexicographic with x1 > x2 > x3 > x4.
pub const QUARTIC_EXPONENTS: [[u8; 4]; N_QUARTIC] = build_quartic_exponents();

/// Position of a degree-4 exponent in [`QUARTIC_EXPONENTS`].
pub fn quartic_index(exp: [u8; 4]) -> Option<usize> {
    QUARTIC_EXPONENTS.iter().position(|e| *e == exp)
}

fn check_finite(values: &[f64], what: &str) -> Result<()> {
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(HankelError::InvalidInput(format!(
            "{what}: entry {i} is not finite"
        )));
    }
    Ok(())
}

/// The 13 numbers `v0..v12` that define a Hankel tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratingVector([f64; 13]);

impl GeneratingVector {
    pub fn new(v: [f64; 13]) -> Result<Self> {
        check_finite(&v, "generating vector")?;
        Ok(Self(v))
    }

    pub fn from_slice(v: &[f64]) -> Result<Self> {
        let arr: [f64; 13] = v.try_into().map_err(|_| {
            HankelError::InvalidInput(format!(
                "generating vector needs 13 entries, got {}",
                v.len()
            ))
        })?;
        Self::new(arr)
    }

    pub fn as_array(&self) -> &[f64; 13] {
        &self.0
    }

    pub fn get(&self, j: usize) -> f64 {
        self.0[j]
    }

    /// True when `v_j = v_{12-j}` for every `j`.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..=5).all(|j| (self.0[j] - self.0[12 - j]).abs() <= tol)
    }

    /// Hankel polynomial via its explicit monomial expansion.
    pub fn evaluate(&self, x: &Vec4) -> f64 {
        let v = &self.0;
        let [x1, x2, x3, x4] = x.0;
        let (s1, s2, s3, s4) = (x1 * x1, x2 * x2, x3 * x3, x4 * x4);
        v[0] * s1 * s1
            + 4.0 * v[1] * s1 * x1 * x2
            + v[2] * (4.0 * s1 * x1 * x3 + 6.0 * s1 * s2)
            + v[3] * (4.0 * x1 * s2 * x2 + 4.0 * s1 * x1 * x4 + 12.0 * s1 * x2 * x3)
            + v[4] * (s2 * s2 + 6.0 * s1 * s3 + 12.0 * x1 * s2 * x3 + 12.0 * s1 * x2 * x4)
            + v[5]
                * (4.0 * s2 * x2 * x3
                    + 12.0 * x1 * x2 * s3
                    + 12.0 * x1 * s2 * x4
                    + 12.0 * s1 * x3 * x4)
            + v[6]
                * (4.0 * x1 * s3 * x3
                    + 4.0 * s2 * x2 * x4
                    + 6.0 * s1 * s4
                    + 6.0 * s2 * s3
                    + 24.0 * x1 * x2 * x3 * x4)
            + v[7]
                * (4.0 * x2 * s3 * x3
                    + 12.0 * s2 * x3 * x4
                    + 12.0 * x1 * s3 * x4
                    + 12.0 * x1 * x2 * s4)
            + v[8] * (s3 * s3 + 6.0 * s2 * s4 + 12.0 * x2 * s3 * x4 + 12.0 * x1 * x3 * s4)
            + v[9] * (4.0 * s3 * x3 * x4 + 4.0 * x1 * s4 * x4 + 12.0 * x2 * x3 * s4)
            + v[10] * (4.0 * x2 * s4 * x4 + 6.0 * s3 * s4)
            + 4.0 * v[11] * x3 * s4 * x4
            + v[12] * s4 * s4
    }

    /// Literal 256-term tensor contraction. Slow; used as a reference.
    pub fn evaluate_oracle(&self, x: &Vec4) -> f64 {
        let mut sum = 0.0;
        for i1 in 0..4 {
            for i2 in 0..4 {
                for i3 in 0..4 {
                    for i4 in 0..4 {
                        sum += self.0[i1 + i2 + i3 + i4] * x.0[i1] * x.0[i2] * x.0[i3] * x.0[i4];
                    }
                }
            }
        }
        sum
    }

    /// Gradient of the Hankel polynomial.
    ///
    /// `df/dx_k = 4 * sum_m v[k+m] c_m`, where `c` is the triple
    /// self-convolution of `x` (0-based indices).
    pub fn gradient(&self, x: &Vec4) -> Vec4 {
        let mut sq = [0.0; 7];
        for i in 0..4 {
            for j in 0..4 {
                sq[i + j] += x.0[i] * x.0[j];
            }
        }
        let mut cube = [0.0; 10];
        for (m, s) in sq.iter().enumerate() {
            for l in 0..4 {
                cube[m + l] += s * x.0[l];
            }
        }
        let mut g = [0.0; 4];
        for (k, gk) in g.iter_mut().enumerate() {
            *gk = 4.0 * cube.iter().enumerate().map(|(m, c)| self.0[k + m] * c).sum::<f64>();
        }
        Vec4(g)
    }

    /// Expand into the 35 monomial coefficients.
    pub fn to_quartic(&self) -> QuarticForm {
        let mut coeffs = [0.0; N_QUARTIC];
        for (c, e) in coeffs.iter_mut().zip(QUARTIC_EXPONENTS.iter()) {
            let hankel_index = (e[1] + 2 * e[2] + 3 * e[3]) as usize;
            *c = multinomial4(*e) * self.0[hankel_index];
        }
        QuarticForm { coeffs }
    }
}

/// `4! / (a1! a2! a3! a4!)`
pub fn multinomial4(e: [u8; 4]) -> f64 {
    const FACT: [f64; 5] = [1.0, 1.0, 2.0, 6.0, 24.0];
    24.0 / e.iter().map(|&a| FACT[a as usize]).product::<f64>()
}

impl Serialize for GeneratingVector {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for GeneratingVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        GeneratingVector::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// A point `P = (v2, v6, v1, v3, v5)` of the symmetric family with `v4 = v8 = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlicePoint {
    pub v2: f64,
    pub v6: f64,
    pub v1: f64,
    pub v3: f64,
    pub v5: f64,
}

impl SlicePoint {
    pub fn new(v2: f64, v6: f64, v1: f64, v3: f64, v5: f64) -> Result<Self> {
        Self::from_array([v2, v6, v1, v3, v5])
    }

    /// Coordinates in the order `(v2, v6, v1, v3, v5)`.
    pub fn from_array(a: [f64; 5]) -> Result<Self> {
        check_finite(&a, "slice point")?;
        Ok(Self {
            v2: a[0],
            v6: a[1],
            v1: a[2],
            v3: a[3],
            v5: a[4],
        })
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.v2, self.v6, self.v1, self.v3, self.v5]
    }

    /// Flip the sign of the odd entries `v1, v3, v5`.
    pub fn negate_odd(&self) -> Self {
        Self {
            v1: -self.v1,
            v3: -self.v3,
            v5: -self.v5,
            ..*self
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Componentwise midpoint.
    pub fn midpoint(&self, other: &SlicePoint) -> SlicePoint {
        let (a, b) = (self.to_array(), other.to_array());
        let mut m = [0.0; 5];
        for i in 0..5 {
            m[i] = 0.5 * (a[i] + b[i]);
        }
        SlicePoint::from_array(m).expect("midpoint of finite points is finite")
    }
}

impl fmt::Display for SlicePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {}, {})",
            self.v2, self.v6, self.v1, self.v3, self.v5
        )
    }
}

impl std::str::FromStr for SlicePoint {
    type Err = HankelError;

    /// Parses `v2,v6,v1,v3,v5`.
    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim().parse::<f64>().map_err(|e| {
                    HankelError::InvalidInput(format!("bad coordinate {p:?} in point: {e}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let arr: [f64; 5] = parts.as_slice().try_into().map_err(|_| {
            HankelError::InvalidInput(format!(
                "point needs 5 coordinates v2,v6,v1,v3,v5; got {}",
                parts.len()
            ))
        })?;
        SlicePoint::from_array(arr)
    }
}

impl Serialize for SlicePoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_array().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SlicePoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let a = <[f64; 5]>::deserialize(d)?;
        SlicePoint::from_array(a).map_err(serde::de::Error::custom)
    }
}

/// Symmetric generating vector `(v0, v1, v2, v3, 1, v5, v6, v5, 1, v3, v2, v1, v0)`.
pub fn assemble(p: &SlicePoint, v0: f64) -> GeneratingVector {
    GeneratingVector([
        v0, p.v1, p.v2, p.v3, 1.0, p.v5, p.v6, p.v5, 1.0, p.v3, p.v2, p.v1, v0,
    ])
}

/// A point of R^4.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vec4(pub [f64; 4]);

impl Vec4 {
    pub fn new(x1: f64, x2: f64, x3: f64, x4: f64) -> Self {
        Self([x1, x2, x3, x4])
    }

    pub fn basis(k: usize) -> Self {
        let mut x = [0.0; 4];
        x[k] = 1.0;
        Self(x)
    }

    pub fn dot(&self, o: &Vec4) -> f64 {
        self.0.iter().zip(o.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, t: f64) -> Vec4 {
        Vec4(self.0.map(|v| v * t))
    }

    pub fn add(&self, o: &Vec4) -> Vec4 {
        Vec4([
            self.0[0] + o.0[0],
            self.0[1] + o.0[1],
            self.0[2] + o.0[2],
            self.0[3] + o.0[3],
        ])
    }

    pub fn sub(&self, o: &Vec4) -> Vec4 {
        self.add(&o.scale(-1.0))
    }

    pub fn reversed(&self) -> Vec4 {
        Vec4([self.0[3], self.0[2], self.0[1], self.0[0]])
    }

    pub fn normalized(&self) -> Vec4 {
        self.scale(1.0 / self.norm())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

/// Dense quartic form `f(x) = sum_a c_a x^a` over the 35 degree-4 monomials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticForm {
    coeffs: [f64; N_QUARTIC],
}

impl QuarticForm {
    pub fn zero() -> Self {
        Self {
            coeffs: [0.0; N_QUARTIC],
        }
    }

    /// Coefficients in [`QUARTIC_EXPONENTS`] order.
    pub fn from_coeffs(coeffs: [f64; N_QUARTIC]) -> Result<Self> {
        check_finite(&coeffs, "quartic form")?;
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64; N_QUARTIC] {
        &self.coeffs
    }

    pub fn coeff(&self, exp: [u8; 4]) -> f64 {
        quartic_index(exp).map_or(0.0, |i| self.coeffs[i])
    }

    pub fn coeff_mut(&mut self, exp: [u8; 4]) -> &mut f64 {
        let i = quartic_index(exp).expect("exponent must have degree 4");
        &mut self.coeffs[i]
    }

    pub fn evaluate(&self, x: &Vec4) -> f64 {
        self.coeffs
            .iter()
            .zip(QUARTIC_EXPONENTS.iter())
            .map(|(c, e)| c * monomial(x, *e))
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `1 + max |c_a|`, the reference magnitude for tolerances.
    pub fn scale(&self) -> f64 {
        1.0 + self.max_abs_coeff()
    }

    pub fn add_scaled(&self, other: &QuarticForm, t: f64) -> QuarticForm {
        let mut coeffs = self.coeffs;
        for (c, o) in coeffs.iter_mut().zip(other.coeffs.iter()) {
            *c += t * o;
        }
        QuarticForm { coeffs }
    }

    /// `x1^4 + x2^4 + x3^4 + x4^4`
    pub fn sum_of_fourth_powers() -> QuarticForm {
        let mut q = QuarticForm::zero();
        for k in 0..4 {
            let mut e = [0u8; 4];
            e[k] = 4;
            *q.coeff_mut(e) = 1.0;
        }
        q
    }

    /// Largest coefficientwise difference.
    pub fn max_abs_diff(&self, other: &QuarticForm) -> f64 {
        self.coeffs
            .iter()
            .zip(other.coeffs.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// `x^e` for a four-variable exponent.
pub fn monomial(x: &Vec4, e: [u8; 4]) -> f64 {
    x.0.iter()
        .zip(e.iter())
        .map(|(xi, &a)| xi.powi(a as i32))
        .product()
}

fn exponent_key(e: [u8; 4]) -> String {
    format!("{}{}{}{}", e[0], e[1], e[2], e[3])
}

impl Serialize for QuarticForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = s.serialize_map(Some(N_QUARTIC))?;
        for (c, e) in self.coeffs.iter().zip(QUARTIC_EXPONENTS.iter()) {
            map.serialize_entry(&exponent_key(*e), c)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for QuarticForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let map = BTreeMap::<String, f64>::deserialize(d)?;
        if map.len() != N_QUARTIC {
            return Err(D::Error::custom(format!(
                "quartic form needs {N_QUARTIC} coefficients, got {}",
                map.len()
            )));
        }
        let mut coeffs = [0.0; N_QUARTIC];
        for (c, e) in coeffs.iter_mut().zip(QUARTIC_EXPONENTS.iter()) {
            *c = *map
                .get(&exponent_key(*e))
                .ok_or_else(|| D::Error::custom(format!("missing monomial {}", exponent_key(*e))))?;
        }
        QuarticForm::from_coeffs(coeffs).map_err(D::Error::custom)
    }
}
