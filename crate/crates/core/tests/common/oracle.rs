//! Literal normalized permutation sums for `∘` and `∙`.

use std::collections::HashMap;

use linfty::scalar::{factorial, Q};
use linfty::space::{Space, Vector};
use linfty::symop::{koszul_sign, InhomOp};

pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Ordered compositions of `n` into `k` non-negative parts.
pub fn compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// All ordered tuples of `n` basis indices.
pub fn tuples(space: &Space, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for t in &out {
            for i in 0..space.dim() {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// Non-decreasing tuples of `n` basis indices.
pub fn sorted_tuples(space: &Space, n: usize) -> Vec<Vec<usize>> {
    tuples(space, n).into_iter().filter(|t| t.windows(2).all(|w| w[0] <= w[1])).collect()
}

/// Memoized `b` on sub-tuples of basis indices.
struct Inner<'a> {
    b: &'a InhomOp,
    cache: HashMap<Vec<usize>, Vector>,
}

impl Inner<'_> {
    fn at(&mut self, idx: &[usize]) -> Vector {
        if let Some(v) = self.cache.get(idx) {
            return v.clone();
        }
        let v = eval(self.b, &units(self.b.source(), idx));
        self.cache.insert(idx.to_vec(), v.clone());
        v
    }
}

fn eval(a: &InhomOp, args: &[Vector]) -> Vector {
    a.eval(args).unwrap()
}

fn units(space: &Space, idx: &[usize]) -> Vec<Vector> {
    idx.iter().map(|&i| Vector::unit(space, i)).collect()
}

fn sigma_sign(space: &Space, tuple: &[usize], sigma: &[usize]) -> Q {
    let degs: Vec<i32> = tuple.iter().map(|&i| space.degree(i)).collect();
    koszul_sign(sigma, &degs)
}

/// `(a∘b)_n(x) = Σ_σ ± Σ_k 1/(k!(n-k)!) a_{n-k+1}(b_k(x_σ1..x_σk), x_σ(k+1)..x_σn)`.
pub fn circle_at(a: &InhomOp, b: &InhomOp, tuple: &[usize]) -> Vector {
    let l = a.source();
    let n = tuple.len();
    let mut acc = Vector::zero(a.target());
    let mut inner = Inner { b, cache: HashMap::new() };
    for sigma in permutations(n) {
        let s = sigma_sign(l, tuple, &sigma);
        let xs: Vec<usize> = sigma.iter().map(|&p| tuple[p]).collect();
        for k in 0..=n {
            if n - k + 1 > a.max_arity() {
                continue;
            }
            let mut args = vec![inner.at(&xs[..k])];
            args.extend(units(l, &xs[k..]));
            let v = eval(a, &args);
            let c = &s / (factorial(k) * factorial(n - k));
            acc = &acc + &v.scale(&c);
        }
    }
    acc
}

/// `(a∙b)_n(x) = Σ_σ ± Σ_k 1/k! Σ_{n_1+..+n_k=n} 1/(n_1!..n_k!) a_k(b_{n_1}(..), .., b_{n_k}(..))`.
pub fn bullet_at(a: &InhomOp, b: &InhomOp, tuple: &[usize]) -> Vector {
    let k_space = b.source();
    let n = tuple.len();
    let mut acc = Vector::zero(a.target());
    let mut inner = Inner { b, cache: HashMap::new() };
    for sigma in permutations(n) {
        let s = sigma_sign(k_space, tuple, &sigma);
        let xs: Vec<usize> = sigma.iter().map(|&p| tuple[p]).collect();
        for k in 0..=a.max_arity() {
            for parts in compositions(n, k) {
                let mut start = 0;
                let mut args = Vec::with_capacity(k);
                let mut denom = factorial(k);
                for &p in &parts {
                    args.push(inner.at(&xs[start..start + p]));
                    start += p;
                    denom *= factorial(p);
                }
                let v = eval(a, &args);
                acc = &acc + &v.scale(&(&s / denom));
            }
        }
    }
    acc
}
