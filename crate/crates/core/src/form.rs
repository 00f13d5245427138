//! Constant differential forms on ℝⁿ.
//!
//! A form of degree `m` is stored sparsely as coefficients over strictly
//! increasing index tuples (0-based: index 0 is `dx`, 1 is `dy`, ...).
//! Tuples given in any order are sorted at construction and the permutation
//! sign is folded into the coefficient.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vector;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MForm {
    dim: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

/// Sort `idx` in place and return the sign of the sorting permutation, or
/// `None` if an index repeats.
fn sort_with_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl MForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Self {
            dim,
            degree,
            coeffs: BTreeMap::new(),
        }
    }

    /// Build a form from `(index tuple, coefficient)` terms; tuples need not be
    /// sorted. Terms with a repeated index vanish.
    pub fn new<I>(dim: usize, degree: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        if degree > dim {
            return Err(Error::DegreeOverflow { degree, dim });
        }
        let mut form = Self::zero(dim, degree);
        for (mut idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::DimensionMismatch {
                    expected: degree,
                    found: idx.len(),
                });
            }
            if let Some(&bad) = idx.iter().find(|&&i| i >= dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bad + 1,
                });
            }
            if let Some(sign) = sort_with_sign(&mut idx) {
                form.accumulate(idx, sign * c);
            }
        }
        Ok(form)
    }

    /// The 0-form with constant value `c`.
    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut f = Self::zero(dim, 0);
        f.accumulate(Vec::new(), c);
        f
    }

    /// The coordinate differential `dx_i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        let mut f = Self::zero(dim, 1);
        f.accumulate(vec![i], 1.0);
        f
    }

    /// `dv = v₁ dx₁ + … + vₙ dxₙ`.
    pub fn covector(v: &Vector) -> Self {
        let mut f = Self::zero(v.len(), 1);
        for (i, c) in v.iter().enumerate() {
            f.accumulate(vec![i], *c);
        }
        f
    }

    fn accumulate(&mut self, idx: Vec<usize>, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.coeffs.entry(idx.clone()).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            self.coeffs.remove(&idx);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient on a sorted index tuple; zero when absent.
    pub fn coeff(&self, idx: &[usize]) -> f64 {
        self.coeffs.get(idx).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Coefficient vector of a 1-form.
    pub fn to_vector(&self) -> Option<Vector> {
        (self.degree == 1).then(|| Vector::from_fn(self.dim, |i, _| self.coeff(&[i])))
    }

    /// Largest absolute coefficient.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self, eps: f64) -> bool {
        self.max_abs() <= eps
    }

    /// Coefficientwise comparison. Forms of different shape never match.
    pub fn approx_eq(&self, other: &Self, eps: f64) -> bool {
        self.dim == other.dim && self.degree == other.degree && (self - other).max_abs() <= eps
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = Self::zero(self.dim, self.degree);
        for (k, v) in &self.coeffs {
            out.accumulate(k.clone(), s * v);
        }
        out
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.degree != other.degree {
            return Err(Error::DimensionMismatch {
                expected: self.degree,
                found: other.degree,
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.accumulate(k.clone(), *v);
        }
        Ok(out)
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let degree = self.degree + other.degree;
        if degree > self.dim {
            return Err(Error::DegreeOverflow {
                degree,
                dim: self.dim,
            });
        }
        let mut out = Self::zero(self.dim, degree);
        for (ka, va) in &self.coeffs {
            for (kb, vb) in &other.coeffs {
                let mut idx: Vec<usize> = ka.iter().chain(kb.iter()).copied().collect();
                if let Some(sign) = sort_with_sign(&mut idx) {
                    out.accumulate(idx, sign * va * vb);
                }
            }
        }
        Ok(out)
    }

    /// Hodge star for the standard metric and orientation of ℝⁿ:
    /// `e_I ↦ sign(I, Iᶜ) e_{Iᶜ}`.
    pub fn hodge_star(&self) -> Self {
        let mut out = Self::zero(self.dim, self.dim - self.degree);
        for (k, v) in &self.coeffs {
            let complement: Vec<usize> = (0..self.dim).filter(|i| !k.contains(i)).collect();
            let mut perm: Vec<usize> = k.iter().chain(complement.iter()).copied().collect();
            let sign = sort_with_sign(&mut perm).expect("disjoint index sets");
            out.accumulate(complement, sign * v);
        }
        out
    }
}

impl Add for &MForm {
    type Output = MForm;
    fn add(self, rhs: &MForm) -> MForm {
        self.try_add(rhs).expect("forms of equal shape")
    }
}

impl Sub for &MForm {
    type Output = MForm;
    fn sub(self, rhs: &MForm) -> MForm {
        self.try_add(&rhs.scale(-1.0)).expect("forms of equal shape")
    }
}

impl Neg for &MForm {
    type Output = MForm;
    fn neg(self) -> MForm {
        self.scale(-1.0)
    }
}

impl Mul<&MForm> for f64 {
    type Output = MForm;
    fn mul(self, rhs: &MForm) -> MForm {
        rhs.scale(self)
    }
}

fn coord_name(dim: usize, i: usize) -> String {
    if dim <= 3 {
        ["dx", "dy", "dz"][i].to_string()
    } else {
        format!("dx{}", i + 1)
    }
}

impl fmt::Display for MForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, v)) in self.coeffs.iter().enumerate() {
            let basis: Vec<String> = k.iter().map(|&i| coord_name(self.dim, i)).collect();
            let sep = if n == 0 {
                if *v < 0.0 { "-" } else { "" }
            } else if *v < 0.0 {
                " - "
            } else {
                " + "
            };
            let mag = v.abs();
            if basis.is_empty() {
                write!(f, "{sep}{mag}")?;
            } else if (mag - 1.0).abs() < 1e-15 {
                write!(f, "{sep}{}", basis.join("^"))?;
            } else {
                write!(f, "{sep}{mag} {}", basis.join("^"))?;
            }
        }
        Ok(())
    }
}
