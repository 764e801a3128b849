//! Seeded random spaces, vectors, linear maps and operators.

use num::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use crate::linmap::LinMap;
use crate::scalar::{q, Q};
use crate::space::{BasisElement, Space, Sparse, Vector};
use crate::symop::{for_each_multiset, tuple_degree, tuple_weight, InhomOp, SymOp};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A small nonzero rational with numerator in `±1..=3` and denominator in `1..=3`.
pub fn random_q<R: Rng>(rng: &mut R) -> Q {
    let n: i64 = rng.gen_range(1..=3);
    let d: i64 = rng.gen_range(1..=3);
    if rng.gen_bool(0.5) {
        q(n, d)
    } else {
        q(-n, d)
    }
}

/// Random space of dimension `dim` with degrees drawn from `degrees` and weights in `1..n`.
pub fn random_space<R: Rng>(rng: &mut R, name: &str, dim: usize, n: u32, degrees: &[i32]) -> Space {
    let basis = (0..dim)
        .map(|i| BasisElement {
            name: format!("{}{}", name.to_lowercase(), i),
            degree: degrees[rng.gen_range(0..degrees.len())],
            weight: rng.gen_range(1..n),
        })
        .collect();
    Space::from_basis(name, basis, n).expect("generated weights are in range")
}

/// Random sparse vector supported on basis elements of the given degree and weight `>= min_weight`.
pub(crate) fn random_sparse<R: Rng>(rng: &mut R, space: &Space, degree: i32, min_weight: u32, density: f64) -> Sparse {
    let mut v = Sparse::new();
    for i in 0..space.dim() {
        if space.degree(i) == degree && space.weight(i) >= min_weight && rng.gen_bool(density) {
            v.insert(i, random_q(rng));
        }
    }
    v
}

pub fn random_vector<R: Rng>(rng: &mut R, space: &Space, degree: i32, min_weight: u32, density: f64) -> Vector {
    Vector::from_sparse(space, random_sparse(rng, space, degree, min_weight, density))
}

/// Random filtered linear map raising weight by at least `min_shift`.
pub fn random_linmap<R: Rng>(
    rng: &mut R,
    source: &Space,
    target: &Space,
    degree: i32,
    min_shift: u32,
    density: f64,
) -> LinMap {
    let columns = (0..source.dim())
        .map(|i| random_sparse(rng, target, source.degree(i) + degree, source.weight(i) + min_shift, density))
        .collect();
    LinMap::from_columns(source, target, degree, columns)
}

/// Random filtered graded symmetric operator of arity `n` with filtration degree `>= min_shift`.
pub fn random_symop<R: Rng>(
    rng: &mut R,
    source: &Space,
    target: &Space,
    n: usize,
    degree: i32,
    min_shift: u32,
    density: f64,
) -> SymOp {
    let mut op = SymOp::zero(source, target, n, degree);
    let mut keys = Vec::new();
    for_each_multiset(source, n, target.filtration_length(), |t| keys.push(t.to_vec()));
    for key in keys {
        let repeated_odd = key.windows(2).any(|w| w[0] == w[1] && source.degree(w[0]) % 2 != 0);
        if repeated_odd {
            continue;
        }
        let deg = tuple_degree(source, &key) + degree;
        let w = tuple_weight(source, &key) + min_shift;
        let v = random_sparse(rng, target, deg, w, density);
        if !v.is_empty() {
            op.set_sorted(key, v);
        }
    }
    op
}

/// Random inhomogeneous operator; `arities` limits which components may be nonzero.
pub fn random_inhom<R: Rng>(
    rng: &mut R,
    source: &Space,
    target: &Space,
    degree: i32,
    min_shift: u32,
    density: f64,
    arities: std::ops::RangeInclusive<usize>,
) -> InhomOp {
    let mut op = InhomOp::zero(source, target, degree);
    for n in 0..=op.max_arity() {
        if arities.contains(&n) {
            op.set_component(n, random_symop(rng, source, target, n, degree, min_shift, density));
        }
    }
    op
}

/// Random rational that may be zero, for sampling points.
pub fn random_q_or_zero<R: Rng>(rng: &mut R) -> Q {
    if rng.gen_bool(0.2) {
        Q::zero()
    } else {
        random_q(rng)
    }
}

/// Degrees used by the generic operator generators.
pub const DEGREES: &[i32] = &[0, 0, 1];

/// Random spaces sharing one filtration length in `4..=5`, of dimension at most `max_dim`,
/// with most weights equal to 1 so that compositions of several operators survive truncation.
pub fn random_spaces<R: Rng>(rng: &mut R, names: &[&str], max_dim: usize) -> Vec<Space> {
    random_spaces_with(rng, names, max_dim, DEGREES)
}

pub fn random_spaces_with<R: Rng>(rng: &mut R, names: &[&str], max_dim: usize, degrees: &[i32]) -> Vec<Space> {
    let n = rng.gen_range(4..=5);
    names
        .iter()
        .map(|name| {
            let dim = rng.gen_range(max_dim.min(2)..=max_dim);
            let basis = (0..dim)
                .map(|i| BasisElement {
                    name: format!("{}{}", name.to_lowercase(), i),
                    degree: degrees[rng.gen_range(0..degrees.len())],
                    weight: if rng.gen_bool(0.75) { 1 } else { rng.gen_range(1..n) },
                })
                .collect();
            Space::from_basis(*name, basis, n).expect("generated weights are in range")
        })
        .collect()
}

/// Operator degrees for the generic generators.
pub fn random_degree<R: Rng>(rng: &mut R) -> i32 {
    [-1, 0, 0, 1][rng.gen_range(0..4)]
}

/// Random filtered operator with components in every arity.
pub fn random_op<R: Rng>(rng: &mut R, source: &Space, target: &Space, degree: i32) -> InhomOp {
    let top = InhomOp::max_arity_for(target);
    random_inhom(rng, source, target, degree, 0, 0.8, 0..=top)
}

/// A square-zero differential, nonzero only on basis elements of one parity.
pub fn random_differential<R: Rng>(rng: &mut R, space: &Space) -> LinMap {
    let parity = rng.gen_range(0..2);
    let d = random_linmap(rng, space, space, 1, 0, 0.5);
    let columns = (0..space.dim())
        .map(|i| if space.degree(i).rem_euclid(2) == parity { d.column(i).clone() } else { Sparse::new() })
        .collect();
    LinMap::from_columns(space, space, 1, columns)
}
