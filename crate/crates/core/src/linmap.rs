//! Homogeneous linear maps between filtered graded spaces.

use std::fmt;

use num::One;

use crate::error::Result;
use crate::scalar::Q;
use crate::space::{sparse_add_scaled, sparse_scale, Space, Sparse, Vector, Weight};

/// A linear map given by the image of each source basis element.
#[derive(Clone, PartialEq, Eq)]
pub struct LinMap {
    source: Space,
    target: Space,
    degree: i32,
    columns: Vec<Sparse>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinMapViolationKind {
    /// The image is not homogeneous of degree `deg(e) + degree`.
    Degree,
    /// The image has smaller weight than the basis element.
    Filtration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinMapViolation {
    pub basis: String,
    pub kind: LinMapViolationKind,
    pub image: Vector,
}

impl fmt::Display for LinMapViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.kind {
            LinMapViolationKind::Degree => "degree",
            LinMapViolationKind::Filtration => "filtration",
        };
        write!(f, "{what} violation at {}: image {}", self.basis, self.image)
    }
}

impl LinMap {
    pub fn zero(source: &Space, target: &Space, degree: i32) -> LinMap {
        LinMap {
            source: source.clone(),
            target: target.clone(),
            degree,
            columns: vec![Sparse::new(); source.dim()],
        }
    }

    pub fn identity(space: &Space) -> LinMap {
        let columns = (0..space.dim())
            .map(|i| {
                let mut s = Sparse::new();
                s.insert(i, Q::one());
                s
            })
            .collect();
        LinMap { source: space.clone(), target: space.clone(), degree: 0, columns }
    }

    /// Builds a map from `(source basis name, image)` pairs; unlisted basis elements map to zero.
    pub fn from_images(
        source: &Space,
        target: &Space,
        degree: i32,
        images: &[(&str, Vector)],
    ) -> Result<LinMap> {
        let mut m = LinMap::zero(source, target, degree);
        for (name, v) in images {
            let i = source.index_of(name)?;
            target.ensure_same(v.space())?;
            m.columns[i] = v.sparse().clone();
        }
        Ok(m)
    }

    pub(crate) fn from_columns(source: &Space, target: &Space, degree: i32, columns: Vec<Sparse>) -> LinMap {
        assert_eq!(columns.len(), source.dim());
        LinMap { source: source.clone(), target: target.clone(), degree, columns }
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub(crate) fn column(&self, i: usize) -> &Sparse {
        &self.columns[i]
    }

    pub fn image_of_basis(&self, i: usize) -> Vector {
        Vector::from_sparse(&self.target, self.columns[i].clone())
    }

    pub(crate) fn apply_sparse(&self, v: &Sparse) -> Sparse {
        let mut out = Sparse::new();
        for (&i, c) in v {
            sparse_add_scaled(&mut out, &self.columns[i], c);
        }
        out
    }

    pub fn apply(&self, v: &Vector) -> Result<Vector> {
        self.source.ensure_same(v.space())?;
        Ok(Vector::from_sparse(&self.target, self.apply_sparse(v.sparse())))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinMap) -> Result<LinMap> {
        self.source.ensure_same(&other.target)?;
        let columns = other.columns.iter().map(|c| self.apply_sparse(c)).collect();
        Ok(LinMap::from_columns(&other.source, &self.target, self.degree + other.degree, columns))
    }

    pub fn try_add(&self, other: &LinMap) -> Result<LinMap> {
        self.source.ensure_same(&other.source)?;
        self.target.ensure_same(&other.target)?;
        let columns = self
            .columns
            .iter()
            .zip(&other.columns)
            .map(|(a, b)| {
                let mut s = a.clone();
                sparse_add_scaled(&mut s, b, &Q::one());
                s
            })
            .collect();
        Ok(LinMap::from_columns(&self.source, &self.target, self.degree, columns))
    }

    pub fn try_sub(&self, other: &LinMap) -> Result<LinMap> {
        self.try_add(&other.scale(&-Q::one()))
    }

    pub fn scale(&self, c: &Q) -> LinMap {
        let columns = self.columns.iter().map(|col| sparse_scale(col, c)).collect();
        LinMap::from_columns(&self.source, &self.target, self.degree, columns)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_empty())
    }

    /// Nonzero columns as `(basis name, image)` pairs.
    pub fn nonzero_columns(&self) -> Vec<(String, Vector)> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_empty())
            .map(|(i, c)| (self.source.basis_name(i).to_string(), Vector::from_sparse(&self.target, c.clone())))
            .collect()
    }

    /// Minimum of `weight(image) - weight(e)` over basis elements; `None` for the zero map.
    pub fn weight_shift(&self) -> Option<i64> {
        self.columns
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match self.target.sparse_weight(c) {
                Weight::Infinite => None,
                Weight::Finite(w) => Some(w as i64 - self.source.weight(i) as i64),
            })
            .min()
    }
}

/// Lists degree-homogeneity and filtration violations; empty means valid.
pub fn check_linmap(m: &LinMap) -> Vec<LinMapViolation> {
    let mut out = Vec::new();
    for (i, col) in m.columns.iter().enumerate() {
        let expected = m.source.degree(i) + m.degree;
        let image = Vector::from_sparse(&m.target, col.clone());
        if !image.is_homogeneous_of(expected) {
            out.push(LinMapViolation {
                basis: m.source.basis_name(i).to_string(),
                kind: LinMapViolationKind::Degree,
                image: image.clone(),
            });
        }
        if image.weight() < Weight::Finite(m.source.weight(i)) {
            out.push(LinMapViolation {
                basis: m.source.basis_name(i).to_string(),
                kind: LinMapViolationKind::Filtration,
                image,
            });
        }
    }
    out
}

impl fmt::Debug for LinMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LinMap({} -> {}, deg {}) {{", self.source.name(), self.target.name(), self.degree)?;
        for (name, v) in self.nonzero_columns() {
            write!(f, " {name} |-> {v};")?;
        }
        write!(f, " }}")
    }
}

impl LinMap {
    /// True if every column is zero after subtracting `other` (same shape required).
    pub fn same_as(&self, other: &LinMap) -> bool {
        self.source == other.source
            && self.target == other.target
            && self.columns == other.columns
            && (self.degree == other.degree || (self.is_zero() && other.is_zero()))
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target
            && self.columns.iter().enumerate().all(|(i, c)| c.len() == 1 && c.get(&i).is_some_and(|x| x.is_one()))
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(|c| c.len()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qi;

    fn levels() -> Space {
        let mut d = Vec::new();
        let names: Vec<(String, i32, u32)> = (1..=3)
            .flat_map(|k| [(format!("a{k}"), 0, k), (format!("b{k}"), 1, k)])
            .collect();
        for (n, deg, w) in &names {
            d.push((n.as_str(), *deg, *w));
        }
        Space::new("L", &d, 4).unwrap()
    }

    #[test]
    fn differential_is_valid_and_homotopy_drop_is_flagged() {
        let s = levels();
        let images: Vec<(String, Vector)> =
            (1..=3).map(|k| (format!("a{k}"), Vector::basis(&s, &format!("b{k}")).unwrap())).collect();
        let refs: Vec<(&str, Vector)> = images.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
        let delta = LinMap::from_images(&s, &s, 1, &refs).unwrap();
        assert!(check_linmap(&delta).is_empty());
        assert!(delta.compose(&delta).unwrap().is_zero());

        let h = LinMap::from_images(&s, &s, -1, &[("b3", Vector::basis(&s, "a1").unwrap())]).unwrap();
        let v = check_linmap(&h);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, LinMapViolationKind::Filtration);
        assert_eq!(v[0].basis, "b3");

        assert!(check_linmap(&LinMap::zero(&s, &s, 5)).is_empty());
    }

    #[test]
    fn degree_violation() {
        let s = levels();
        let m = LinMap::from_images(&s, &s, 0, &[("a1", Vector::basis(&s, "b1").unwrap().scale(&qi(2)))]).unwrap();
        let v = check_linmap(&m);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, LinMapViolationKind::Degree);
    }
}
