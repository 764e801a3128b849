//! Nilpotent matrix DGLAs and the `⊗ t·Q[t]/(t^N)` construction.

use std::collections::BTreeMap;

use num::One;

use crate::error::{Error, Result};
use crate::linmap::LinMap;
use crate::scalar::{sign, Q};
use crate::space::{sparse_add_scaled, BasisElement, Space, Sparse};
use crate::structure::{shift_table, Brackets, CurvedStructure, Dgla};
use crate::symop::{unit, InhomOp, SymOp};

/// Strictly upper triangular `n×n` matrices over a graded space with degrees `degrees`,
/// modulo the entries `e_ij` with `j − i >= cutoff`, with differential `[Q, ·]`.
///
/// `e_ij` has degree `degrees[i] − degrees[j]` and weight `2^{j−i} − 1`; the filtration length
/// is `2^{cutoff−1}`. `q` lists coefficients of `Q` on superdiagonal entries `e_{i,i+1}`.
pub fn matrix_dgla(degrees: &[i32], cutoff: usize, q: &[(usize, Q)]) -> Result<Dgla> {
    let n = degrees.len();
    if cutoff < 2 {
        return Err(Error::NotDgla("cutoff must be at least 2".into()));
    }
    let mut entries = Vec::new();
    for level in 1..cutoff.min(n) {
        for i in 0..n - level {
            entries.push((i, i + level));
        }
    }
    let basis: Vec<BasisElement> = entries
        .iter()
        .map(|&(i, j)| BasisElement {
            name: format!("e{}{}", i + 1, j + 1),
            degree: degrees[i] - degrees[j],
            weight: (1u32 << (j - i)) - 1,
        })
        .collect();
    let space = Space::from_basis("G", basis, 1u32 << (cutoff - 1))?;
    let index: BTreeMap<(usize, usize), usize> = entries.iter().enumerate().map(|(k, &e)| (e, k)).collect();
    let deg = |k: usize| space.degree(k) as i64;

    let product = |a: usize, b: usize| -> Option<usize> {
        let (i, j) = entries[a];
        let (k, l) = entries[b];
        if j == k {
            index.get(&(i, l)).copied()
        } else {
            None
        }
    };
    let mut bracket = Brackets { arity: 2, values: BTreeMap::new() };
    for a in 0..entries.len() {
        for b in 0..entries.len() {
            let mut v = Sparse::new();
            if let Some(c) = product(a, b) {
                sparse_add_scaled(&mut v, &unit(c), &Q::one());
            }
            if let Some(c) = product(b, a) {
                sparse_add_scaled(&mut v, &unit(c), &-sign(deg(a) * deg(b)));
            }
            if !v.is_empty() {
                bracket.values.insert(vec![a, b], v);
            }
        }
    }

    let mut q_vec = Sparse::new();
    for (pos, c) in q {
        let k = *index
            .get(&(*pos, pos + 1))
            .ok_or_else(|| Error::NotDgla(format!("no superdiagonal entry at {pos}")))?;
        if space.degree(k) != 1 {
            return Err(Error::NotDgla(format!("Q has a component of degree {}", space.degree(k))));
        }
        q_vec.insert(k, c.clone());
    }
    let bracket_with = |x: &Sparse, k: usize| -> Sparse {
        let mut out = Sparse::new();
        for (&a, c) in x {
            if let Some(v) = bracket.values.get(&vec![a, k]) {
                sparse_add_scaled(&mut out, v, c);
            }
        }
        out
    };
    let columns: Vec<Sparse> = (0..space.dim()).map(|k| bracket_with(&q_vec, k)).collect();
    let differential = LinMap::from_columns(&space, &space, 1, columns);
    if !differential.compose(&differential)?.is_zero() {
        return Err(Error::NotDgla("[Q, [Q, ·]] does not vanish".into()));
    }
    Ok(Dgla { space, differential, bracket })
}

/// Default degree pattern `d_i = ⌈(n − i)/2⌉` for `i = 1..n`.
pub fn default_degrees(n: usize) -> Vec<i32> {
    (1..=n).map(|i| ((n - i + 1) / 2) as i32).collect()
}

/// `G ⊗ t·Q[t]/(t^N)` with weight the `t`-exponent and brackets landing `shift` powers higher.
pub fn tensor_dgla(core: &Dgla, n: u32, shift: u32) -> Result<Dgla> {
    let c = &core.space;
    let idx = |x: usize, k: u32| (k as usize - 1) * c.dim() + x;
    let mut basis = Vec::new();
    for k in 1..n {
        for x in 0..c.dim() {
            basis.push(BasisElement { name: format!("{}{}", c.basis_name(x), k), degree: c.degree(x), weight: k });
        }
    }
    let space = Space::from_basis(format!("{}t", c.name()), basis, n)?;
    let mut columns = vec![Sparse::new(); space.dim()];
    for k in 1..n {
        for x in 0..c.dim() {
            columns[idx(x, k)] = core.differential.column(x).iter().map(|(&y, v)| (idx(y, k), v.clone())).collect();
        }
    }
    let mut values = BTreeMap::new();
    for (key, v) in &core.bracket.values {
        for a in 1..n {
            for b in 1..n {
                let k = a + b + shift;
                if k >= n {
                    continue;
                }
                let out: Sparse = v.iter().map(|(&y, c)| (idx(y, k), c.clone())).collect();
                values.insert(vec![idx(key[0], a), idx(key[1], b)], out);
            }
        }
    }
    Ok(Dgla {
        differential: LinMap::from_columns(&space, &space, 1, columns),
        space,
        bracket: Brackets { arity: 2, values },
    })
}

/// Unfiltered curved L∞ data: `δ` and symmetric brackets of arity `>= 2` on sorted multisets.
#[derive(Debug, Clone)]
pub struct CoreStructure {
    pub space: Space,
    pub delta: LinMap,
    pub brackets: Vec<(usize, BTreeMap<Vec<usize>, Sparse>)>,
}

/// The shifted L∞ data of an unfiltered DGLA.
pub fn core_from_dgla(dgla: &Dgla, name: &str) -> Result<CoreStructure> {
    let l = dgla.space.shifted(name);
    let table = shift_table(&dgla.space, &l, &dgla.bracket)?;
    let delta = LinMap::from_columns(&l, &l, 1, (0..l.dim()).map(|i| dgla.differential.column(i).clone()).collect());
    Ok(CoreStructure { space: l, delta, brackets: vec![(2, table)] })
}

/// `core ⊗ t·Q[t]/(t^N)`: basis `x_k = x·t^k` of weight `k`, `δ` unchanged in `t`, and
/// `λ_n` multiplying `t`-powers with an extra `t^{shift·(n−1)}`.
pub fn tensor_nilpotent(core: &CoreStructure, name: &str, n: u32, shift: u32) -> Result<CurvedStructure> {
    if shift == 0 {
        return Err(Error::NotPronilpotent("t-shift must be at least 1".into()));
    }
    let c = &core.space;
    let idx = |x: usize, k: u32| (k as usize - 1) * c.dim() + x;
    let mut basis = Vec::new();
    for k in 1..n {
        for x in 0..c.dim() {
            basis.push(BasisElement { name: format!("{}{}", c.basis_name(x), k), degree: c.degree(x), weight: k });
        }
    }
    let space = Space::from_basis(name, basis, n)?;
    let mut columns = vec![Sparse::new(); space.dim()];
    for k in 1..n {
        for x in 0..c.dim() {
            columns[idx(x, k)] = core.delta.column(x).iter().map(|(&y, v)| (idx(y, k), v.clone())).collect();
        }
    }
    let delta = LinMap::from_columns(&space, &space, 1, columns);
    let mut lambda = InhomOp::zero(&space, &space, 1);
    for (arity, table) in &core.brackets {
        let arity = *arity;
        if arity < 2 {
            if table.values().any(|v| !v.is_empty()) {
                return Err(Error::NotPronilpotent(format!("core bracket of arity {arity} cannot be made nilpotent")));
            }
            continue;
        }
        if arity > lambda.max_arity() {
            continue;
        }
        let extra = shift * (arity as u32 - 1);
        let mut entries: BTreeMap<Vec<usize>, (Vec<usize>, Sparse)> = BTreeMap::new();
        for (key, v) in table {
            let mut powers = vec![1u32; arity];
            loop {
                let total: u32 = powers.iter().sum::<u32>() + extra;
                if total < n {
                    let tuple: Vec<usize> = key.iter().zip(&powers).map(|(&x, &k)| idx(x, k)).collect();
                    let out: Sparse = v.iter().map(|(&y, c)| (idx(y, total), c.clone())).collect();
                    let mut sorted = tuple.clone();
                    sorted.sort_unstable();
                    entries.insert(sorted, (tuple, out));
                }
                if !next_powers(&mut powers, n - 1) {
                    break;
                }
            }
        }
        let mut comp = SymOp::zero(&space, &space, arity, 1);
        for (tuple, out) in entries.values() {
            comp.add_entry(tuple, out)?;
        }
        lambda.set_component(arity, comp);
    }
    let s = CurvedStructure::new(delta, lambda)?;
    s.require_pronilpotent()?;
    Ok(s)
}

fn next_powers(p: &mut [u32], max: u32) -> bool {
    for x in p.iter_mut() {
        if *x < max {
            *x += 1;
            return true;
        }
        *x = 1;
    }
    false
}

/// The FIX-B core: `m, a` of degree 0, `b` of degree 1, `δa = b`, `λ_2(m, m) = b`.
pub fn fix_b_core() -> CoreStructure {
    let space = Space::new("core", &[("m", 0, 1), ("a", 0, 1), ("b", 1, 1)], 2).expect("valid core");
    let mut delta_cols = vec![Sparse::new(); 3];
    delta_cols[1] = unit(2);
    let delta = LinMap::from_columns(&space, &space, 1, delta_cols);
    let mut table = BTreeMap::new();
    table.insert(vec![0, 0], unit(2));
    CoreStructure { space, delta, brackets: vec![(2, table)] }
}
