//! The circle product `a ∘ b`, the composition `a ∙ b`, its derivative
//! `a ∘_b β` and the twisted differential `δ_λ`.
//!
//! Both products are evaluated on sorted input multisets. The circle product
//! sums over `(k, n-k)`-shuffles; the composition sums over unordered set
//! partitions of the inputs, with any number of arity-0 blocks fed `b_0`.
//! Each term carries the Koszul sign of the reordering it performs, which
//! matches the normalized sums over all of `S_n`.
//!
//! `a ∘_b β` is read off from `a ∙ (b + βε)` over the exterior algebra on one
//! generator `ε` of degree `-1`: the engine carries every block value as a
//! pair `body + soul·ε`, and the ε-coefficient of the result is `a ∘_b β`.

use std::ops::{Add, Mul};

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::linmap::LinMap;
use crate::scalar::{factorial, sign, Q};
use crate::space::{sparse_add_scaled, sparse_scale, Space, Sparse, Vector};
use crate::symop::{
    for_each_multiset, hom_differential, koszul_odd, tuple_degree, unit, InhomOp, SymOp,
};

/// `body + soul·ε` with `ε² = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsScalar {
    pub body: Q,
    pub soul: Q,
}

impl EpsScalar {
    pub fn new(body: Q, soul: Q) -> EpsScalar {
        EpsScalar { body, soul }
    }
}

impl Mul for &EpsScalar {
    type Output = EpsScalar;
    fn mul(self, rhs: &EpsScalar) -> EpsScalar {
        EpsScalar { body: &self.body * &rhs.body, soul: &self.body * &rhs.soul + &self.soul * &rhs.body }
    }
}

impl Add for &EpsScalar {
    type Output = EpsScalar;
    fn add(self, rhs: &EpsScalar) -> EpsScalar {
        EpsScalar { body: &self.body + &rhs.body, soul: &self.soul + &rhs.soul }
    }
}

/// A vector over the ε-extended scalars, `body + soul·ε` with ε written on the right.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub(crate) struct EpsVector {
    pub body: Sparse,
    pub soul: Sparse,
    /// Degree of the body; the soul has degree `degree + 1`.
    pub degree: i32,
}

impl EpsVector {
    fn is_zero(&self) -> bool {
        self.body.is_empty() && self.soul.is_empty()
    }
}

/// Evaluates `a_k` on ε-extended arguments. Moving `ε` from argument `p` to the
/// right end passes the bodies of the later arguments.
fn eval_eps(a: &SymOp, args: &[&EpsVector], want_soul: bool) -> (Sparse, Sparse) {
    let bodies: Vec<&Sparse> = args.iter().map(|x| &x.body).collect();
    let body = if bodies.iter().any(|b| b.is_empty()) { Sparse::new() } else { a.eval_sparse(&bodies) };
    let mut soul = Sparse::new();
    if want_soul {
        let mut later: i64 = args.iter().map(|x| x.degree as i64).sum();
        for (p, x) in args.iter().enumerate() {
            later -= x.degree as i64;
            if x.soul.is_empty() {
                continue;
            }
            let mut slot = bodies.clone();
            slot[p] = &x.soul;
            if slot.iter().any(|b| b.is_empty()) {
                continue;
            }
            let term = a.eval_sparse(&slot);
            sparse_add_scaled(&mut soul, &term, &sign(later));
        }
    }
    (body, soul)
}

/// All set partitions of `{0, .., n-1}`, blocks ordered by their least element.
pub(crate) fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, n, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, n, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

fn check_composable(a: &InhomOp, b: &InhomOp) -> Result<()> {
    b.target().ensure_same(a.source())?;
    if b.degree() != 0 && !b.is_zero() {
        return Err(Error::DegreeMismatch(format!("inner operator must have degree 0, found {}", b.degree())));
    }
    Ok(())
}

/// Shared engine for `a ∙ (b + βε)`. Returns the arity-`n` parts of the body
/// (`a ∙ b`) and, when `beta` is given, of the soul (`a ∘_b β`).
fn bullet_engine(
    a: &InhomOp,
    b: &InhomOp,
    beta: Option<&InhomOp>,
    n: usize,
    want_body: bool,
) -> (SymOp, SymOp) {
    let k_space = b.source();
    let mut body_out = SymOp::zero(k_space, a.target(), n, a.degree());
    let mut soul_out = SymOp::zero(k_space, a.target(), n, a.degree() + 1);
    let bound = a.target().filtration_length();
    let partitions = set_partitions(n);
    let want_soul = beta.is_some();

    let block_value = |sub: &[usize]| -> EpsVector {
        let m = sub.len();
        let degree = tuple_degree(k_space, sub);
        let body = b.component(m).map(|c| c.eval_basis(sub)).unwrap_or_default();
        let soul = match beta.and_then(|bt| bt.component(m)) {
            Some(c) => sparse_scale(&c.eval_basis(sub), &sign(degree as i64)),
            None => Sparse::new(),
        };
        EpsVector { body, soul, degree }
    };
    let b0 = block_value(&[]);
    let b0_zero = b0.is_zero();
    let inv_fact: Vec<Q> = (0..=a.max_arity()).map(|j| Q::one() / factorial(j)).collect();

    for_each_multiset(k_space, n, bound, |tuple| {
        let degs: Vec<i32> = tuple.iter().map(|&i| k_space.degree(i)).collect();
        let total = tuple_degree(k_space, tuple) as i64;
        let mut body_acc = Sparse::new();
        let mut soul_acc = Sparse::new();
        for blocks in &partitions {
            let m = blocks.len();
            if m > a.max_arity() {
                continue;
            }
            let mut values = Vec::with_capacity(m);
            let mut dead = false;
            for blk in blocks {
                let sub: Vec<usize> = blk.iter().map(|&p| tuple[p]).collect();
                let v = block_value(&sub);
                if v.is_zero() || (!want_soul && v.body.is_empty()) {
                    dead = true;
                    break;
                }
                values.push(v);
            }
            if dead {
                continue;
            }
            let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
            let ksign = if koszul_odd(&perm, &degs) { -Q::one() } else { Q::one() };
            let max_j = if b0_zero { 0 } else { a.max_arity() - m };
            for j in 0..=max_j {
                let comp = &a.components()[m + j];
                if comp.is_zero() {
                    continue;
                }
                let mut args: Vec<&EpsVector> = Vec::with_capacity(m + j);
                args.extend(std::iter::repeat(&b0).take(j));
                args.extend(values.iter());
                let (vb, vs) = eval_eps(comp, &args, want_soul);
                let c = &ksign * &inv_fact[j];
                if want_body {
                    sparse_add_scaled(&mut body_acc, &vb, &c);
                }
                sparse_add_scaled(&mut soul_acc, &vs, &c);
            }
        }
        if want_body {
            body_out.set_sorted(tuple.to_vec(), body_acc);
        }
        if want_soul {
            soul_out.set_sorted(tuple.to_vec(), sparse_scale(&soul_acc, &sign(total)));
        }
    });
    (body_out, soul_out)
}

/// Arity-`n` component of `a ∙ b`.
pub fn bullet_component(a: &InhomOp, b: &InhomOp, n: usize) -> Result<SymOp> {
    check_composable(a, b)?;
    Ok(bullet_engine(a, b, None, n, true).0)
}

/// `a ∙ b` for `a ∈ S^i(L, M)`, `b ∈ S^0(K, L)`.
pub fn bullet(a: &InhomOp, b: &InhomOp) -> Result<InhomOp> {
    check_composable(a, b)?;
    let mut out = InhomOp::zero(b.source(), a.target(), a.degree());
    for n in 0..=out.max_arity() {
        out.set_component(n, bullet_engine(a, b, None, n, true).0);
    }
    Ok(out)
}

/// Arity-`n` component of `a ∘_b β`.
pub fn circle_b_component(a: &InhomOp, b: &InhomOp, beta: &InhomOp, n: usize) -> Result<SymOp> {
    check_circle_b(a, b, beta)?;
    Ok(bullet_engine(a, b, Some(beta), n, false).1)
}

fn check_circle_b(a: &InhomOp, b: &InhomOp, beta: &InhomOp) -> Result<()> {
    check_composable(a, b)?;
    beta.source().ensure_same(b.source())?;
    beta.target().ensure_same(b.target())?;
    if beta.degree() != 1 && !beta.is_zero() {
        return Err(Error::DegreeMismatch(format!("direction must have degree 1, found {}", beta.degree())));
    }
    Ok(())
}

/// `a ∘_b β`, defined by `a ∙ (b + βε) = a ∙ b + (a ∘_b β) ε`.
pub fn circle_b(a: &InhomOp, b: &InhomOp, beta: &InhomOp) -> Result<InhomOp> {
    check_circle_b(a, b, beta)?;
    let mut out = InhomOp::zero(b.source(), a.target(), a.degree() + 1);
    for n in 0..=out.max_arity() {
        out.set_component(n, bullet_engine(a, b, Some(beta), n, false).1);
    }
    Ok(out)
}

/// Both parts of `a ∙ (b + βε)` at once.
pub fn bullet_eps(a: &InhomOp, b: &InhomOp, beta: &InhomOp) -> Result<(InhomOp, InhomOp)> {
    check_circle_b(a, b, beta)?;
    let mut body = InhomOp::zero(b.source(), a.target(), a.degree());
    let mut soul = InhomOp::zero(b.source(), a.target(), a.degree() + 1);
    for n in 0..=body.max_arity() {
        let (x, y) = bullet_engine(a, b, Some(beta), n, true);
        body.set_component(n, x);
        soul.set_component(n, y);
    }
    Ok((body, soul))
}

/// Arity-`n` component of `a ∘ b`.
pub fn circle_component(a: &InhomOp, b: &InhomOp, n: usize) -> Result<SymOp> {
    check_circle(a, b)?;
    Ok(circle_engine(a, b, n))
}

fn check_circle(a: &InhomOp, b: &InhomOp) -> Result<()> {
    b.source().ensure_same(a.source())?;
    b.target().ensure_same(a.source())
}

fn circle_engine(a: &InhomOp, b: &InhomOp, n: usize) -> SymOp {
    let l = a.source();
    let mut out = SymOp::zero(l, a.target(), n, a.degree() + b.degree());
    let bound = a.target().filtration_length();
    for_each_multiset(l, n, bound, |tuple| {
        let degs: Vec<i32> = tuple.iter().map(|&i| l.degree(i)).collect();
        let mut acc = Sparse::new();
        for mask in 0u32..(1 << n) {
            let inner: Vec<usize> = (0..n).filter(|p| mask & (1 << p) != 0).collect();
            let outer: Vec<usize> = (0..n).filter(|p| mask & (1 << p) == 0).collect();
            let k = inner.len();
            let arity = n - k + 1;
            if arity > a.max_arity() || a.components()[arity].is_zero() {
                continue;
            }
            let Some(bk) = b.component(k) else { continue };
            let sub: Vec<usize> = inner.iter().map(|&p| tuple[p]).collect();
            let v = bk.eval_basis(&sub);
            if v.is_empty() {
                continue;
            }
            let units: Vec<Sparse> = outer.iter().map(|&p| unit(tuple[p])).collect();
            let mut args: Vec<&Sparse> = Vec::with_capacity(arity);
            args.push(&v);
            args.extend(units.iter());
            let val = a.components()[arity].eval_sparse(&args);
            let perm: Vec<usize> = inner.iter().chain(outer.iter()).copied().collect();
            let c = if koszul_odd(&perm, &degs) { -Q::one() } else { Q::one() };
            sparse_add_scaled(&mut acc, &val, &c);
        }
        out.set_sorted(tuple.to_vec(), acc);
    });
    out
}

/// `a ∘ b` for `a ∈ S^i(L, M)`, `b ∈ S^j(L, L)`.
pub fn circle(a: &InhomOp, b: &InhomOp) -> Result<InhomOp> {
    check_circle(a, b)?;
    let mut out = InhomOp::zero(a.source(), a.target(), a.degree() + b.degree());
    for n in 0..=out.max_arity() {
        out.set_component(n, circle_engine(a, b, n));
    }
    Ok(out)
}

/// `Σ_n (1/n!) a_n(x, .., x)` for a degree-0 point `x`.
pub fn mc_apply(a: &InhomOp, x: &Vector) -> Result<Vector> {
    a.source().ensure_same(x.space())?;
    if !x.is_homogeneous_of(0) {
        return Err(Error::DegreeMismatch("Maurer-Cartan points have degree 0".into()));
    }
    let mut acc = Sparse::new();
    for (n, comp) in a.components().iter().enumerate() {
        if comp.is_zero() || (n > 0 && x.is_zero()) {
            continue;
        }
        let args: Vec<&Sparse> = vec![x.sparse(); n];
        let v = comp.eval_sparse(&args);
        sparse_add_scaled(&mut acc, &v, &(Q::one() / factorial(n)));
    }
    Ok(Vector::from_sparse(a.target(), acc))
}

/// `δ_λ f = δf + λ ∘ f - (-1)^{|f|} f ∘ λ` on `S(L, L)`.
pub fn delta_lambda(f: &InhomOp, lambda: &InhomOp, delta: &LinMap) -> Result<InhomOp> {
    if lambda.degree() != 1 && !lambda.is_zero() {
        return Err(Error::DegreeMismatch("structure operator must have degree 1".into()));
    }
    let df = hom_differential(f, delta, delta)?;
    let lf = circle(lambda, f)?;
    let fl = circle(f, lambda)?;
    let s = -sign(f.degree() as i64);
    df.try_add(&lf)?.add_scaled(&fl, &s)
}

/// The zero operator `S(K, L)` of degree 1, handy as a direction for `∘_b`.
pub fn zero_direction(source: &Space, target: &Space) -> InhomOp {
    InhomOp::zero(source, target, 1)
}

impl EpsScalar {
    pub fn zero() -> EpsScalar {
        EpsScalar { body: Q::zero(), soul: Q::zero() }
    }

    pub fn epsilon() -> EpsScalar {
        EpsScalar { body: Q::zero(), soul: Q::one() }
    }
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
    fn bell_numbers() {
        let counts: Vec<usize> = (0..6).map(|n| set_partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 15, 52]);
    }

    #[test]
    fn eps_scalar_squares_to_zero() {
        let e = EpsScalar::epsilon();
        assert_eq!(&e * &e, EpsScalar::zero());
        let x = EpsScalar::new(qi(2), qi(3));
        let y = EpsScalar::new(qi(5), qi(7));
        assert_eq!(&x * &y, EpsScalar::new(qi(10), qi(29)));
        assert_eq!(&x + &y, EpsScalar::new(qi(7), qi(10)));
    }

    #[test]
    fn lambda_circle_lambda_vanishes_on_fix_a() {
        let (_, l) = fix_a();
        assert!(circle(&l, &l).unwrap().is_zero());
    }

    #[test]
    fn mc_apply_on_fix_a() {
        let (s, l) = fix_a();
        let a = Vector::basis(&s, "a").unwrap();
        let b = Vector::basis(&s, "b").unwrap();
        for t in [qi(1), q(-3, 2), q(5, 7)] {
            let got = mc_apply(&l, &a.scale(&t)).unwrap();
            let expected = b.scale(&(&t + &t * &t / qi(2)));
            assert_eq!(got, expected);
        }
        assert!(mc_apply(&l, &a.scale(&qi(-2))).unwrap().is_zero());
        assert_eq!(mc_apply(&l, &Vector::zero(&s)).unwrap(), l.constant_term());
        assert!(matches!(mc_apply(&l, &b), Err(Error::DegreeMismatch(_))));
    }

    #[test]
    fn mc_apply_matches_bullet_with_point() {
        let (s, l) = fix_a();
        let x = Vector::basis(&s, "a").unwrap().scale(&q(2, 3));
        let point = InhomOp::constant(&x).unwrap();
        let composed = bullet(&l, &point).unwrap();
        assert_eq!(composed.constant_term(), mc_apply(&l, &x).unwrap());
    }

    #[test]
    fn units_on_fix_a() {
        let (s, l) = fix_a();
        let one = InhomOp::identity(&s);
        assert_eq!(bullet(&l, &one).unwrap(), l);
        assert!(bullet(&one, &l).is_err());
        let zero_dir = zero_direction(&s, &s);
        assert!(circle_b(&l, &one, &zero_dir).unwrap().is_zero());
    }

    #[test]
    fn delta_lambda_degenerate_cases() {
        let (s, l) = fix_a();
        let zero_delta = LinMap::zero(&s, &s, 1);
        let zero_f = InhomOp::zero(&s, &s, 0);
        assert!(delta_lambda(&zero_f, &l, &zero_delta).unwrap().is_zero());
    }
}
