//! The worked fixtures.
//!
//! FIX-A: `a` (degree 0, weight 1), `b` (degree 1, weight 3), `N = 4`, `δ = 0`,
//! `λ_1(a) = b`, `λ_2(a, a) = b`. FIX-A′ adds `c` (degree 2, weight 3) with `λ_1(b) = c`.
//!
//! FIX-B: `L = span{m, a, b} ⊗ t^{1..3}` (`m_k`, `a_k`, `b_k` stand for `m·t^k` etc.),
//! `δ a_k = b_k`, `λ_2(m_i, m_j) = b_{i+j+1}`; `M = span{mbar_k}`, `f(mbar_k) = m_k`,
//! `g(m_k) = mbar_k`, `h(b_k) = a_k`. FIX-C perturbs FIX-B by `μ(m_k) = μ(a_k) = b_{k+1}`.

use crate::context::Context;
use crate::linmap::LinMap;
use crate::space::{Space, Vector};
use crate::structure::CurvedStructure;
use crate::symop::InhomOp;

fn v(space: &Space, name: &str) -> Vector {
    Vector::basis(space, name).expect("fixture basis name")
}

pub fn fix_a_space() -> Space {
    Space::new("A", &[("a", 0, 1), ("b", 1, 3)], 4).expect("valid fixture")
}

pub fn fix_a() -> CurvedStructure {
    let s = fix_a_space();
    let mut lambda = InhomOp::zero(&s, &s, 1);
    lambda.component_mut(1).add_named(&["a"], &v(&s, "b")).expect("valid entry");
    lambda.component_mut(2).add_named(&["a", "a"], &v(&s, "b")).expect("valid entry");
    CurvedStructure::new(LinMap::zero(&s, &s, 1), lambda).expect("FIX-A is a structure")
}

/// FIX-A as its own context: `f = g = 1`, `h = 0`.
pub fn fix_a_self_context() -> Context {
    Context::identity(fix_a().delta())
}

/// FIX-A′: the data only; it violates the structure equation.
pub fn fix_a_prime() -> (LinMap, InhomOp) {
    let s = Space::new("A'", &[("a", 0, 1), ("b", 1, 3), ("c", 2, 3)], 4).expect("valid fixture");
    let mut lambda = InhomOp::zero(&s, &s, 1);
    lambda.component_mut(1).add_named(&["a"], &v(&s, "b")).expect("valid entry");
    lambda.component_mut(1).add_named(&["b"], &v(&s, "c")).expect("valid entry");
    lambda.component_mut(2).add_named(&["a", "a"], &v(&s, "b")).expect("valid entry");
    (LinMap::zero(&s, &s, 1), lambda)
}

pub fn fix_b_spaces() -> (Space, Space) {
    let names: Vec<(String, i32, u32)> = (1..=3u32)
        .flat_map(|k| [(format!("m{k}"), 0, k), (format!("a{k}"), 0, k), (format!("b{k}"), 1, k)])
        .collect();
    let refs: Vec<(&str, i32, u32)> = names.iter().map(|(n, d, w)| (n.as_str(), *d, *w)).collect();
    let l = Space::new("L", &refs, 4).expect("valid fixture");
    let m = Space::new("M", &[("mbar1", 0, 1), ("mbar2", 0, 2), ("mbar3", 0, 3)], 4).expect("valid fixture");
    (l, m)
}

pub fn fix_b_context() -> Context {
    let (l, m) = fix_b_spaces();
    let map = |src: &Space, tgt: &Space, deg: i32, pairs: &[(String, String)]| {
        let images: Vec<(&str, Vector)> = pairs.iter().map(|(a, b)| (a.as_str(), v(tgt, b))).collect();
        LinMap::from_images(src, tgt, deg, &images).expect("fixture names")
    };
    let ks = 1..=3;
    let delta = map(&l, &l, 1, &ks.clone().map(|k| (format!("a{k}"), format!("b{k}"))).collect::<Vec<_>>());
    let f = map(&m, &l, 0, &ks.clone().map(|k| (format!("mbar{k}"), format!("m{k}"))).collect::<Vec<_>>());
    let g = map(&l, &m, 0, &ks.clone().map(|k| (format!("m{k}"), format!("mbar{k}"))).collect::<Vec<_>>());
    let h = map(&l, &l, -1, &ks.map(|k| (format!("b{k}"), format!("a{k}"))).collect::<Vec<_>>());
    Context::new(delta, LinMap::zero(&m, &m, 1), f, g, h).expect("FIX-B context is valid")
}

pub fn fix_b_structure() -> CurvedStructure {
    let ctx = fix_b_context();
    let l = ctx.big().clone();
    let mut lambda = InhomOp::zero(&l, &l, 1);
    for i in 1..=3 {
        for j in i..=3 {
            if i + j + 1 <= 3 {
                lambda
                    .component_mut(2)
                    .add_named(&[&format!("m{i}"), &format!("m{j}")], &v(&l, &format!("b{}", i + j + 1)))
                    .expect("valid entry");
            }
        }
    }
    CurvedStructure::new(ctx.delta().clone(), lambda).expect("FIX-B is a structure")
}

/// The four MC samples `{0, mbar1, mbar1 + mbar2, mbar3}` of `M`.
pub fn fix_b_samples() -> Vec<Vector> {
    let (_, m) = fix_b_spaces();
    vec![
        Vector::zero(&m),
        v(&m, "mbar1"),
        v(&m, "mbar1").try_add(&v(&m, "mbar2")).expect("same space"),
        v(&m, "mbar3"),
    ]
}

/// FIX-C: `μ(m_k) = μ(a_k) = b_{k+1}`.
pub fn fix_c_perturbation() -> LinMap {
    let (l, _) = fix_b_spaces();
    let mut images = Vec::new();
    for k in 1..=2 {
        images.push((format!("m{k}"), v(&l, &format!("b{}", k + 1))));
        images.push((format!("a{k}"), v(&l, &format!("b{}", k + 1))));
    }
    let refs: Vec<(&str, Vector)> = images.iter().map(|(n, x)| (n.as_str(), x.clone())).collect();
    LinMap::from_images(&l, &l, 1, &refs).expect("fixture names")
}
