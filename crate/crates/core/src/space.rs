//! Finite-dimensional graded vector spaces with a weight filtration.
//!
//! A space carries an ordered basis; each basis element has a degree and a
//! weight in `1..N`. The filtration is `F_k = span{e : weight(e) >= k}`, so
//! `F_1` is the whole space and `F_N` is zero.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{format_q, Q};

/// Sparse coefficient map keyed by basis index. Zero coefficients are never stored.
pub type Sparse = BTreeMap<usize, Q>;

pub(crate) fn sparse_add_scaled(acc: &mut Sparse, v: &Sparse, c: &Q) {
    if c.is_zero() {
        return;
    }
    for (&i, x) in v {
        let entry = acc.entry(i).or_insert_with(Q::zero);
        *entry += x * c;
        if entry.is_zero() {
            acc.remove(&i);
        }
    }
}

pub(crate) fn sparse_add_term(acc: &mut Sparse, i: usize, c: Q) {
    if c.is_zero() {
        return;
    }
    let entry = acc.entry(i).or_insert_with(Q::zero);
    *entry += c;
    if entry.is_zero() {
        acc.remove(&i);
    }
}

pub(crate) fn sparse_scale(v: &Sparse, c: &Q) -> Sparse {
    if c.is_zero() {
        return Sparse::new();
    }
    v.iter().map(|(&i, x)| (i, x * c)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub degree: i32,
    pub weight: u32,
}

#[derive(Debug, PartialEq, Eq)]
struct SpaceInner {
    name: String,
    basis: Vec<BasisElement>,
    filtration_length: u32,
    index: HashMap<String, usize>,
}

/// A graded space with a finite weight filtration. Cheap to clone.
#[derive(Clone)]
pub struct Space(Arc<SpaceInner>);

impl PartialEq for Space {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.name == other.0.name
                && self.0.basis == other.0.basis
                && self.0.filtration_length == other.0.filtration_length)
    }
}

impl Eq for Space {}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Space({}, dim {}, N={})", self.name(), self.dim(), self.filtration_length())
    }
}

/// Filtration weight of a vector; the zero vector has infinite weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weight {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Finite(w) => write!(f, "{w}"),
            Weight::Infinite => write!(f, "inf"),
        }
    }
}

impl Space {
    /// Builds and validates a space. Descriptors are `(name, degree, weight)`.
    pub fn new<S: Into<String>>(
        name: S,
        descriptors: &[(&str, i32, u32)],
        filtration_length: u32,
    ) -> Result<Space> {
        let basis = descriptors
            .iter()
            .map(|&(n, d, w)| BasisElement { name: n.to_string(), degree: d, weight: w })
            .collect();
        Space::from_basis(name, basis, filtration_length)
    }

    pub fn from_basis<S: Into<String>>(
        name: S,
        basis: Vec<BasisElement>,
        filtration_length: u32,
    ) -> Result<Space> {
        if filtration_length == 0 {
            return Err(Error::EmptyFiltration);
        }
        let mut index = HashMap::with_capacity(basis.len());
        for (i, e) in basis.iter().enumerate() {
            if e.weight < 1 || e.weight >= filtration_length {
                return Err(Error::WeightOutOfRange {
                    name: e.name.clone(),
                    weight: e.weight,
                    max: filtration_length.saturating_sub(1),
                });
            }
            if index.insert(e.name.clone(), i).is_some() {
                return Err(Error::DuplicateBasisName(e.name.clone()));
            }
        }
        Ok(Space(Arc::new(SpaceInner { name: name.into(), basis, filtration_length, index })))
    }

    /// The zero space, the underlying space of the terminal curved algebra.
    pub fn zero() -> Space {
        Space::from_basis("0", Vec::new(), 1).expect("empty basis is valid")
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn dim(&self) -> usize {
        self.0.basis.len()
    }

    pub fn filtration_length(&self) -> u32 {
        self.0.filtration_length
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.0.basis
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.0.basis[i].degree
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.0.basis[i].weight
    }

    pub fn basis_name(&self, i: usize) -> &str {
        &self.0.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.0.index.get(name).copied().ok_or_else(|| Error::UnknownBasis {
            space: self.name().to_string(),
            name: name.to_string(),
        })
    }

    /// Same basis with every degree lowered by one (`L = G[1]`).
    pub fn shifted<S: Into<String>>(&self, name: S) -> Space {
        let basis = self
            .basis()
            .iter()
            .map(|e| BasisElement { degree: e.degree - 1, ..e.clone() })
            .collect();
        Space::from_basis(name, basis, self.filtration_length()).expect("shift keeps validity")
    }

    pub fn ensure_same(&self, other: &Space) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpaceMismatch {
                expected: self.name().to_string(),
                found: other.name().to_string(),
            })
        }
    }

    pub(crate) fn sparse_weight(&self, v: &Sparse) -> Weight {
        v.keys().map(|&i| self.weight(i)).min().map_or(Weight::Infinite, Weight::Finite)
    }

    /// Basis indices of the given degree.
    pub fn indices_of_degree(&self, degree: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degree(i) == degree).collect()
    }
}

/// A vector in a [`Space`], stored sparsely.
#[derive(Clone, PartialEq, Eq)]
pub struct Vector {
    space: Space,
    coeffs: Sparse,
}

impl Vector {
    pub fn zero(space: &Space) -> Vector {
        Vector { space: space.clone(), coeffs: Sparse::new() }
    }

    pub fn basis(space: &Space, name: &str) -> Result<Vector> {
        let i = space.index_of(name)?;
        Ok(Vector::unit(space, i))
    }

    pub fn unit(space: &Space, i: usize) -> Vector {
        let mut coeffs = Sparse::new();
        coeffs.insert(i, Q::one());
        Vector { space: space.clone(), coeffs }
    }

    pub fn from_terms(space: &Space, terms: &[(&str, Q)]) -> Result<Vector> {
        let mut coeffs = Sparse::new();
        for (name, c) in terms {
            sparse_add_term(&mut coeffs, space.index_of(name)?, c.clone());
        }
        Ok(Vector { space: space.clone(), coeffs })
    }

    pub(crate) fn from_sparse(space: &Space, coeffs: Sparse) -> Vector {
        debug_assert!(coeffs.keys().all(|&i| i < space.dim()));
        debug_assert!(coeffs.values().all(|c| !c.is_zero()));
        Vector { space: space.clone(), coeffs }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn sparse(&self) -> &Sparse {
        &self.coeffs
    }

    pub fn into_sparse(self) -> Sparse {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, name: &str) -> Result<Q> {
        let i = self.space.index_of(name)?;
        Ok(self.coeffs.get(&i).cloned().unwrap_or_else(Q::zero))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &Q)> {
        self.coeffs.iter().map(move |(&i, c)| (self.space.basis_name(i), c))
    }

    /// Largest `k` with the vector in `F_k`: the minimum weight over the support.
    pub fn weight(&self) -> Weight {
        self.space.sparse_weight(&self.coeffs)
    }

    /// The common degree of the support, if the vector is homogeneous and nonzero.
    pub fn degree(&self) -> Option<i32> {
        let mut degrees = self.coeffs.keys().map(|&i| self.space.degree(i));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, degree: i32) -> bool {
        self.coeffs.keys().all(|&i| self.space.degree(i) == degree)
    }

    pub fn scale(&self, c: &Q) -> Vector {
        Vector { space: self.space.clone(), coeffs: sparse_scale(&self.coeffs, c) }
    }

    pub fn try_add(&self, other: &Vector) -> Result<Vector> {
        self.space.ensure_same(&other.space)?;
        let mut coeffs = self.coeffs.clone();
        sparse_add_scaled(&mut coeffs, &other.coeffs, &Q::one());
        Ok(Vector { space: self.space.clone(), coeffs })
    }

    pub fn try_sub(&self, other: &Vector) -> Result<Vector> {
        self.try_add(&-other)
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        self.try_add(rhs).expect("vectors from different spaces")
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        self.try_sub(rhs).expect("vectors from different spaces")
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(&-Q::one())
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms().map(|(n, c)| format!("({})*{}", format_q(c), n)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.space.name(), self)
    }
}

/// Ultrametric `c^(-weight(x - y))`, zero when `x = y`.
pub fn filtration_distance(x: &Vector, y: &Vector, c: &Q) -> Result<Q> {
    if *c <= Q::one() {
        return Err(Error::Parse(format!("distance base must exceed 1, got {}", format_q(c))));
    }
    let diff = x.try_sub(y)?;
    Ok(match diff.weight() {
        Weight::Infinite => Q::zero(),
        Weight::Finite(k) => Q::one() / num::pow(c.clone(), k as usize),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn fix_a() -> Space {
        Space::new("A", &[("a", 0, 1), ("b", 1, 3)], 4).unwrap()
    }

    #[test]
    fn make_space_validates_weights() {
        let s = fix_a();
        assert_eq!(s.dim(), 2);
        assert!(matches!(
            Space::new("bad", &[("a", 0, 0)], 4),
            Err(Error::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            Space::new("bad", &[("a", 0, 4)], 4),
            Err(Error::WeightOutOfRange { .. })
        ));
        assert!(matches!(
            Space::new("bad", &[("a", 0, 1), ("a", 1, 2)], 4),
            Err(Error::DuplicateBasisName(_))
        ));
    }

    #[test]
    fn weights_and_distance() {
        let s = fix_a();
        let a = Vector::basis(&s, "a").unwrap();
        let b = Vector::basis(&s, "b").unwrap();
        let z = Vector::zero(&s);
        assert_eq!(a.weight(), Weight::Finite(1));
        assert_eq!((&a + &b).weight(), Weight::Finite(1));
        assert_eq!(z.weight(), Weight::Infinite);
        assert_eq!(filtration_distance(&a, &z, &qi(2)).unwrap(), q(1, 2));
        assert_eq!(filtration_distance(&b, &z, &qi(2)).unwrap(), q(1, 8));
        assert_eq!(filtration_distance(&a, &a, &qi(2)).unwrap(), qi(0));
        let other = Space::new("B", &[("a", 0, 1)], 4).unwrap();
        assert!(matches!(
            filtration_distance(&a, &Vector::zero(&other), &qi(2)),
            Err(Error::SpaceMismatch { .. })
        ));
    }
}
