//! Graded symmetric filtered multilinear operators.
//!
//! A [`SymOp`] of arity `n` stores one value per multiset of `n` source basis
//! elements (kept as a sorted index list). Evaluation on an arbitrary ordered
//! tuple sorts it and applies the Koszul sign, so graded symmetry holds by
//! construction. An [`InhomOp`] is the family `(a_0, a_1, ...)` of such maps
//! of a common degree; arities at or beyond the target's filtration length
//! vanish identically and are not stored.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::linmap::{check_linmap, LinMap};
use crate::scalar::{sign, Q};
use crate::space::{sparse_add_scaled, sparse_scale, Space, Sparse, Vector, Weight};

/// Koszul sign of rearranging `(x_0, ..., x_{n-1})` into `(x_{σ(0)}, ..., x_{σ(n-1)})`.
///
/// Each inverted pair `(p, q)` contributes `(-1)^{|x_p| |x_q|}`.
pub fn koszul_sign(perm: &[usize], degrees: &[i32]) -> Q {
    assert_eq!(perm.len(), degrees.len());
    if koszul_odd(perm, degrees) {
        -Q::one()
    } else {
        Q::one()
    }
}

pub(crate) fn koszul_odd(perm: &[usize], degrees: &[i32]) -> bool {
    let mut odd = false;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] && degrees[perm[i]] % 2 != 0 && degrees[perm[j]] % 2 != 0 {
                odd = !odd;
            }
        }
    }
    odd
}

/// Sorts a tuple of basis indices in place; returns true if the Koszul sign is `-1`.
pub(crate) fn sort_with_sign(tuple: &mut [usize], space: &Space) -> bool {
    let mut odd = false;
    for i in 1..tuple.len() {
        let mut j = i;
        while j > 0 && tuple[j - 1] > tuple[j] {
            if space.degree(tuple[j - 1]) % 2 != 0 && space.degree(tuple[j]) % 2 != 0 {
                odd = !odd;
            }
            tuple.swap(j - 1, j);
            j -= 1;
        }
    }
    odd
}

/// Calls `f` on every sorted multiset of `n` basis indices whose weight sum is below `bound`.
pub(crate) fn for_each_multiset(space: &Space, n: usize, bound: u32, mut f: impl FnMut(&[usize])) {
    fn rec(
        space: &Space,
        n: usize,
        bound: u32,
        start: usize,
        wsum: u32,
        cur: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if cur.len() == n {
            f(cur);
            return;
        }
        for i in start..space.dim() {
            let w = wsum + space.weight(i);
            if w >= bound {
                continue;
            }
            cur.push(i);
            rec(space, n, bound, i, w, cur, f);
            cur.pop();
        }
    }
    let mut cur = Vec::with_capacity(n);
    rec(space, n, bound, 0, 0, &mut cur, &mut f);
}

pub(crate) fn tuple_degree(space: &Space, tuple: &[usize]) -> i32 {
    tuple.iter().map(|&i| space.degree(i)).sum()
}

pub(crate) fn tuple_weight(space: &Space, tuple: &[usize]) -> u32 {
    tuple.iter().map(|&i| space.weight(i)).sum()
}

/// A graded symmetric filtered `n`-linear map `L^n -> M` of fixed degree.
#[derive(Clone, PartialEq, Eq)]
pub struct SymOp {
    source: Space,
    target: Space,
    arity: usize,
    degree: i32,
    table: BTreeMap<Vec<usize>, Sparse>,
}

impl SymOp {
    pub fn zero(source: &Space, target: &Space, arity: usize, degree: i32) -> SymOp {
        SymOp { source: source.clone(), target: target.clone(), arity, degree, table: BTreeMap::new() }
    }

    pub fn source(&self) -> &Space {
        &self.source
    }

    pub fn target(&self) -> &Space {
        &self.target
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    /// Stored `(sorted inputs, value)` pairs.
    pub fn entries(&self) -> impl Iterator<Item = (&[usize], &Sparse)> {
        self.table.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Adds `value` at the given input tuple (any order), after checking degree,
    /// filtration and the vanishing forced on repeated odd inputs.
    pub fn add_entry(&mut self, inputs: &[usize], value: &Sparse) -> Result<()> {
        if inputs.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: inputs.len() });
        }
        if value.is_empty() {
            return Ok(());
        }
        let mut key = inputs.to_vec();
        let odd = sort_with_sign(&mut key, &self.source);
        let expected = tuple_degree(&self.source, &key) + self.degree;
        let out = Vector::from_sparse(&self.target, value.clone());
        if !out.is_homogeneous_of(expected) {
            return Err(Error::DegreeMismatch(format!(
                "value {out} at {} should have degree {expected}",
                self.describe_inputs(&key)
            )));
        }
        let wsum = tuple_weight(&self.source, &key);
        if out.weight() < Weight::Finite(wsum) {
            return Err(Error::NotFiltered(format!(
                "value {out} at {} has weight below {wsum}",
                self.describe_inputs(&key)
            )));
        }
        if key.windows(2).any(|w| w[0] == w[1] && self.source.degree(w[0]) % 2 != 0) {
            return Err(Error::SymmetryViolation(format!(
                "repeated odd input at {} must give zero",
                self.describe_inputs(&key)
            )));
        }
        let c = if odd { -Q::one() } else { Q::one() };
        self.accumulate(key, value, &c);
        Ok(())
    }

    /// Named-input variant of [`SymOp::add_entry`].
    pub fn add_named(&mut self, inputs: &[&str], value: &Vector) -> Result<()> {
        self.target.ensure_same(value.space())?;
        let idx = inputs.iter().map(|n| self.source.index_of(n)).collect::<Result<Vec<_>>>()?;
        self.add_entry(&idx, value.sparse())
    }

    /// Inserts at an already sorted key without validation (engine output).
    pub(crate) fn accumulate(&mut self, key: Vec<usize>, value: &Sparse, c: &Q) {
        if value.is_empty() || c.is_zero() {
            return;
        }
        let slot = self.table.entry(key.clone()).or_default();
        sparse_add_scaled(slot, value, c);
        if slot.is_empty() {
            self.table.remove(&key);
        }
    }

    pub(crate) fn set_sorted(&mut self, key: Vec<usize>, value: Sparse) {
        if value.is_empty() {
            self.table.remove(&key);
        } else {
            self.table.insert(key, value);
        }
    }

    fn describe_inputs(&self, key: &[usize]) -> String {
        let names: Vec<&str> = key.iter().map(|&i| self.source.basis_name(i)).collect();
        format!("({})", names.join(", "))
    }

    /// Value on an ordered tuple of basis indices.
    pub(crate) fn eval_basis(&self, tuple: &[usize]) -> Sparse {
        let mut key = tuple.to_vec();
        let odd = sort_with_sign(&mut key, &self.source);
        match self.table.get(&key) {
            None => Sparse::new(),
            Some(v) if odd => sparse_scale(v, &-Q::one()),
            Some(v) => v.clone(),
        }
    }

    /// Multilinear evaluation on sparse arguments in the source.
    pub(crate) fn eval_sparse(&self, args: &[&Sparse]) -> Sparse {
        debug_assert_eq!(args.len(), self.arity);
        let mut out = Sparse::new();
        if self.table.is_empty() {
            return out;
        }
        let bound = self.target.filtration_length();
        let mut idx = Vec::with_capacity(self.arity);
        self.eval_rec(args, 0, &mut idx, &Q::one(), bound, &mut out);
        out
    }

    fn eval_rec(&self, args: &[&Sparse], wsum: u32, idx: &mut Vec<usize>, coef: &Q, bound: u32, out: &mut Sparse) {
        let pos = idx.len();
        if pos == args.len() {
            let mut key = idx.clone();
            let odd = sort_with_sign(&mut key, &self.source);
            if let Some(v) = self.table.get(&key) {
                if odd {
                    sparse_add_scaled(out, v, &-coef);
                } else {
                    sparse_add_scaled(out, v, coef);
                }
            }
            return;
        }
        for (&i, c) in args[pos] {
            let w = wsum + self.source.weight(i);
            if w >= bound {
                continue;
            }
            idx.push(i);
            self.eval_rec(args, w, idx, &(coef * c), bound, out);
            idx.pop();
        }
    }

    pub fn eval(&self, args: &[Vector]) -> Result<Vector> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: args.len() });
        }
        for a in args {
            self.source.ensure_same(a.space())?;
        }
        let refs: Vec<&Sparse> = args.iter().map(|a| a.sparse()).collect();
        Ok(Vector::from_sparse(&self.target, self.eval_sparse(&refs)))
    }

    fn scaled(&self, c: &Q) -> SymOp {
        let mut out = SymOp::zero(&self.source, &self.target, self.arity, self.degree);
        for (k, v) in &self.table {
            out.accumulate(k.clone(), v, c);
        }
        out
    }

    fn add_scaled(&mut self, other: &SymOp, c: &Q) {
        for (k, v) in &other.table {
            self.accumulate(k.clone(), v, c);
        }
    }

    /// Minimum of `weight(value) - weight(inputs)` over stored entries.
    fn s_degree(&self) -> SDegree {
        self.table
            .iter()
            .filter_map(|(k, v)| match self.target.sparse_weight(v) {
                Weight::Infinite => None,
                Weight::Finite(w) => Some(w as i64 - tuple_weight(&self.source, k) as i64),
            })
            .min()
            .map_or(SDegree::Infinite, SDegree::Finite)
    }
}

impl fmt::Debug for SymOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[arity {}]", self.arity)?;
        for (k, v) in &self.table {
            write!(f, " {} -> {};", self.describe_inputs(k), Vector::from_sparse(&self.target, v.clone()))?;
        }
        Ok(())
    }
}

/// Filtration degree of an inhomogeneous operator; `Infinite` for zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SDegree {
    Finite(i64),
    Infinite,
}

impl fmt::Display for SDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SDegree::Finite(k) => write!(f, "{k}"),
            SDegree::Infinite => write!(f, "inf"),
        }
    }
}

/// An inhomogeneous operator `(a_0, a_1, ...)` from `source` to `target` of one degree.
#[derive(Clone, PartialEq, Eq)]
pub struct InhomOp {
    source: Space,
    target: Space,
    degree: i32,
    components: Vec<SymOp>,
}

impl InhomOp {
    /// Highest arity that can be nonzero: `n` inputs of weight `>= 1` land in `F_n` of the target.
    pub fn max_arity_for(target: &Space) -> usize {
        target.filtration_length().saturating_sub(1) as usize
    }

    pub fn zero(source: &Space, target: &Space, degree: i32) -> InhomOp {
        let components = (0..=InhomOp::max_arity_for(target))
            .map(|n| SymOp::zero(source, target, n, degree))
            .collect();
        InhomOp { source: source.clone(), target: target.clone(), degree, components }
    }

    /// The unit `1_L ∈ S^0(L, L)`.
    pub fn identity(space: &Space) -> InhomOp {
        embed_linmap(&LinMap::identity(space)).expect("identity is valid")
    }

    /// The arity-0 operator `0 -> L` with value `x`, i.e. `x` viewed as a point.
    pub fn constant(x: &Vector) -> Result<InhomOp> {
        let mut op = InhomOp::zero(&Space::zero(), x.space(), x.degree().unwrap_or(0));
        op.components[0].add_entry(&[], x.sparse())?;
        Ok(op)
    }

    /// Builds an operator from its components; each must match source, target and degree.
    pub fn from_components(source: &Space, target: &Space, degree: i32, parts: Vec<SymOp>) -> Result<InhomOp> {
        let mut op = InhomOp::zero(source, target, degree);
        for p in parts {
            p.source.ensure_same(source)?;
            p.target.ensure_same(target)?;
            if p.degree != degree && !p.is_zero() {
                return Err(Error::DegreeMismatch(format!(
                    "component of arity {} has degree {}, expected {degree}",
                    p.arity, p.degree
                )));
            }
            if p.arity > InhomOp::max_arity_for(target) {
                if !p.is_zero() {
                    return Err(Error::NotFiltered(format!("arity {} exceeds the filtration length", p.arity)));
                }
                continue;
            }
            op.components[p.arity].add_scaled(&p, &Q::one());
        }
        Ok(op)
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

    pub fn max_arity(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[SymOp] {
        &self.components
    }

    /// Component of arity `n`; arities past the cap are identically zero.
    pub fn component(&self, n: usize) -> Option<&SymOp> {
        self.components.get(n)
    }

    pub fn component_mut(&mut self, n: usize) -> &mut SymOp {
        &mut self.components[n]
    }

    pub(crate) fn set_component(&mut self, n: usize, c: SymOp) {
        debug_assert_eq!(c.arity, n);
        self.components[n] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(SymOp::is_zero)
    }

    /// Arity-0 value as a vector.
    pub fn constant_term(&self) -> Vector {
        let v = self.components[0].table.get(&Vec::new()).cloned().unwrap_or_default();
        Vector::from_sparse(&self.target, v)
    }

    pub fn eval(&self, args: &[Vector]) -> Result<Vector> {
        match self.components.get(args.len()) {
            Some(c) => c.eval(args),
            None => {
                for a in args {
                    self.source.ensure_same(a.space())?;
                }
                Ok(Vector::zero(&self.target))
            }
        }
    }

    pub fn scale(&self, c: &Q) -> InhomOp {
        InhomOp {
            source: self.source.clone(),
            target: self.target.clone(),
            degree: self.degree,
            components: self.components.iter().map(|p| p.scaled(c)).collect(),
        }
    }

    fn check_compatible(&self, other: &InhomOp) -> Result<()> {
        self.source.ensure_same(&other.source)?;
        self.target.ensure_same(&other.target)?;
        if self.degree != other.degree && !self.is_zero() && !other.is_zero() {
            return Err(Error::DegreeMismatch(format!(
                "cannot add operators of degrees {} and {}",
                self.degree, other.degree
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &InhomOp) -> Result<InhomOp> {
        self.add_scaled(other, &Q::one())
    }

    pub fn try_sub(&self, other: &InhomOp) -> Result<InhomOp> {
        self.add_scaled(other, &-Q::one())
    }

    pub fn add_scaled(&self, other: &InhomOp, c: &Q) -> Result<InhomOp> {
        self.check_compatible(other)?;
        let mut out = if self.is_zero() && !other.is_zero() {
            InhomOp::zero(&self.source, &self.target, other.degree)
        } else {
            self.clone()
        };
        for (a, b) in out.components.iter_mut().zip(&other.components) {
            a.add_scaled(b, c);
        }
        Ok(out)
    }

    /// Applies a linear map to every output: `m ∘ a`.
    pub fn post_compose(&self, m: &LinMap) -> Result<InhomOp> {
        m.source().ensure_same(&self.target)?;
        let mut out = InhomOp::zero(&self.source, m.target(), self.degree + m.degree());
        for (n, comp) in self.components.iter().enumerate() {
            if n > out.max_arity() {
                if comp.table.values().any(|v| !m.apply_sparse(v).is_empty()) {
                    return Err(Error::Internal("post-composition left the filtration range".into()));
                }
                continue;
            }
            for (k, v) in &comp.table {
                let img = m.apply_sparse(v);
                out.components[n].accumulate(k.clone(), &img, &Q::one());
            }
        }
        Ok(out)
    }

    /// Filtration degree: the least `weight(a_n(e)) - Σ weight(e_i)` over nonzero values.
    pub fn s_filtration_degree(&self) -> SDegree {
        self.components.iter().map(SymOp::s_degree).min().unwrap_or(SDegree::Infinite)
    }

    /// Number of stored nonzero entries across all arities.
    pub fn nnz(&self) -> usize {
        self.components.iter().map(|c| c.table.len()).sum()
    }
}

impl fmt::Debug for InhomOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "InhomOp({} -> {}, deg {}) {{", self.source.name(), self.target.name(), self.degree)?;
        for c in &self.components {
            if !c.is_zero() {
                write!(f, " {c:?}")?;
            }
        }
        write!(f, " }}")
    }
}

/// Embeds a filtered homogeneous linear map as an arity-1 operator.
pub fn embed_linmap(m: &LinMap) -> Result<InhomOp> {
    if let Some(v) = check_linmap(m).into_iter().next() {
        return Err(Error::NotFiltered(v.to_string()));
    }
    let mut op = InhomOp::zero(m.source(), m.target(), m.degree());
    if op.max_arity() == 0 {
        if m.is_zero() {
            return Ok(op);
        }
        return Err(Error::NotFiltered("target space admits no arity-1 operators".into()));
    }
    for i in 0..m.source().dim() {
        op.components[1].set_sorted(vec![i], m.column(i).clone());
    }
    Ok(op)
}

/// Hom-complex differential on `S(L, M)`:
/// `(δa)_n(x) = d(a_n(x)) - (-1)^{|a|} Σ_j (-1)^{|x_1|+...+|x_{j-1}|} a_n(x_1, .., δx_j, .., x_n)`.
pub fn hom_differential(a: &InhomOp, delta_source: &LinMap, d_target: &LinMap) -> Result<InhomOp> {
    if delta_source.degree() != 1 || d_target.degree() != 1 {
        return Err(Error::DegreeMismatch("differentials must have degree +1".into()));
    }
    delta_source.source().ensure_same(&a.source)?;
    delta_source.target().ensure_same(&a.source)?;
    d_target.source().ensure_same(&a.target)?;
    d_target.target().ensure_same(&a.target)?;
    let mut out = InhomOp::zero(&a.source, &a.target, a.degree + 1);
    let bound = a.target.filtration_length();
    let outer = -sign(a.degree as i64);
    for n in 0..=a.max_arity() {
        let comp = &a.components[n];
        if comp.is_zero() {
            continue;
        }
        let mut result = SymOp::zero(&a.source, &a.target, n, a.degree + 1);
        for_each_multiset(&a.source, n, bound, |tuple| {
            let mut val = d_target.apply_sparse(&comp.eval_basis(tuple));
            let units: Vec<Sparse> = tuple.iter().map(|&i| unit(i)).collect();
            let mut prefix = 0i64;
            for j in 0..n {
                let dx = delta_source.column(tuple[j]);
                if !dx.is_empty() {
                    let args: Vec<&Sparse> =
                        (0..n).map(|p| if p == j { dx } else { &units[p] }).collect();
                    let term = comp.eval_sparse(&args);
                    sparse_add_scaled(&mut val, &term, &(&outer * sign(prefix)));
                }
                prefix += a.source.degree(tuple[j]) as i64;
            }
            result.set_sorted(tuple.to_vec(), val);
        });
        out.components[n] = result;
    }
    Ok(out)
}

pub(crate) fn unit(i: usize) -> Sparse {
    let mut s = Sparse::new();
    s.insert(i, Q::one());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, qi};

    fn fix_a() -> (Space, InhomOp) {
        let s = Space::new("A", &[("a", 0, 1), ("b", 1, 3)], 4).unwrap();
        let b = Vector::basis(&s, "b").unwrap();
        let mut l = InhomOp::zero(&s, &s, 1);
        l.component_mut(1).add_named(&["a"], &b).unwrap();
        l.component_mut(2).add_named(&["a", "a"], &b).unwrap();
        (s, l)
    }

    #[test]
    fn koszul_examples() {
        assert_eq!(koszul_sign(&[0, 1, 2], &[1, 1, 1]), qi(1));
        assert_eq!(koszul_sign(&[1, 0], &[1, 1]), qi(-1));
        assert_eq!(koszul_sign(&[1, 0], &[1, 2]), qi(1));
    }

    #[test]
    fn symop_eval_on_fixture() {
        let (s, l) = fix_a();
        let a = Vector::basis(&s, "a").unwrap();
        let b = Vector::basis(&s, "b").unwrap();
        assert_eq!(l.eval(&[a.clone(), a.clone()]).unwrap(), b);
        assert!(l.eval(&[a, Vector::zero(&s)]).unwrap().is_zero());
    }

    #[test]
    fn odd_arguments_anticommute() {
        let s = Space::new("O", &[("x", 1, 1), ("y", 1, 1), ("z", 3, 3)], 4).unwrap();
        let mut op = SymOp::zero(&s, &s, 2, 1);
        op.add_named(&["x", "y"], &Vector::basis(&s, "z").unwrap()).unwrap();
        let x = Vector::basis(&s, "x").unwrap();
        let y = Vector::basis(&s, "y").unwrap();
        let xy = op.eval(&[x.clone(), y.clone()]).unwrap();
        let yx = op.eval(&[y, x.clone()]).unwrap();
        assert_eq!(xy, -&yx);
        assert!(matches!(
            op.add_named(&["x", "x"], &Vector::basis(&s, "z").unwrap()),
            Err(Error::SymmetryViolation(_))
        ));
    }

    #[test]
    fn entry_validation() {
        let (s, _) = fix_a();
        let mut op = SymOp::zero(&s, &s, 1, 1);
        let a = Vector::basis(&s, "a").unwrap();
        assert!(matches!(op.add_named(&["a"], &a), Err(Error::DegreeMismatch(_))));
        let mut down = SymOp::zero(&s, &s, 1, -1);
        assert!(matches!(down.add_named(&["b"], &a), Err(Error::NotFiltered(_))));
    }

    #[test]
    fn filtration_degrees() {
        let (s, l) = fix_a();
        assert_eq!(l.s_filtration_degree(), SDegree::Finite(1));
        assert_eq!(InhomOp::zero(&s, &s, 1).s_filtration_degree(), SDegree::Infinite);
        assert_eq!(InhomOp::identity(&s).s_filtration_degree(), SDegree::Finite(0));
        assert_eq!(l.max_arity(), 3);
    }

    #[test]
    fn hom_differential_constant_and_square() {
        let s = Space::new("B", &[("a1", 0, 1), ("b1", 1, 1), ("a2", 0, 2), ("b2", 1, 2)], 3).unwrap();
        let delta = LinMap::from_images(
            &s,
            &s,
            1,
            &[("a1", Vector::basis(&s, "b1").unwrap()), ("a2", Vector::basis(&s, "b2").unwrap())],
        )
        .unwrap();
        let x = Vector::from_terms(&s, &[("a2", q(3, 2))]).unwrap();
        let mut c = InhomOp::zero(&s, &s, 0);
        c.component_mut(0).add_entry(&[], x.sparse()).unwrap();
        let dc = hom_differential(&c, &delta, &delta).unwrap();
        assert_eq!(dc.constant_term(), delta.apply(&x).unwrap());

        let e = embed_linmap(&delta).unwrap();
        assert!(hom_differential(&e, &delta, &delta).unwrap().is_zero());
    }
}
