//! Hodge decomposition contexts onto cohomology, for weight-homogeneous differentials.

use std::collections::BTreeMap;

use num::Zero;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::linalg::{extend_basis, identity, inverse, nullspace, Matrix};
use crate::linmap::LinMap;
use crate::scalar::Q;
use crate::space::{BasisElement, Space, Sparse};

/// Splits each `(weight, degree)` block of `L` as `B ⊕ H ⊕ C` with `δ: C ≅ B'` and builds the
/// context onto `M = H` with `d = 0`, `h = δ⁻¹` on `B` and zero on `H ⊕ C`.
pub fn hodge_context(delta: &LinMap) -> Result<Context> {
    let l = delta.source();
    for i in 0..l.dim() {
        if delta.column(i).keys().any(|&j| l.weight(j) != l.weight(i)) {
            return Err(Error::InvalidContext("the differential is not weight homogeneous".into()));
        }
    }
    let mut blocks: BTreeMap<(u32, i32), Vec<usize>> = BTreeMap::new();
    for i in 0..l.dim() {
        blocks.entry((l.weight(i), l.degree(i))).or_default().push(i);
    }
    let coords = |block: &[usize], v: &Sparse| -> Vec<Q> { block.iter().map(|i| v.get(i).cloned().unwrap_or_default()).collect() };
    let to_sparse = |block: &[usize], v: &[Q]| -> Sparse {
        block.iter().zip(v).filter(|(_, x)| !x.is_zero()).map(|(&i, x)| (i, x.clone())).collect()
    };

    // C for every block: a complement of the cycles.
    let mut cycles: BTreeMap<(u32, i32), Vec<Vec<Q>>> = BTreeMap::new();
    let mut complements: BTreeMap<(u32, i32), Vec<Vec<Q>>> = BTreeMap::new();
    for (&(w, deg), block) in &blocks {
        let next = blocks.get(&(w, deg + 1)).cloned().unwrap_or_default();
        let rows: Matrix = next
            .iter()
            .map(|&j| block.iter().map(|&i| delta.column(i).get(&j).cloned().unwrap_or_default()).collect())
            .collect();
        let z = if rows.is_empty() { identity(block.len()) } else { nullspace(&rows, block.len()) };
        let c = extend_basis(&z, &identity(block.len()), block.len());
        cycles.insert((w, deg), z);
        complements.insert((w, deg), c);
    }

    let mut m_basis = Vec::new();
    let mut f_cols: Vec<Sparse> = Vec::new();
    let mut g_cols = vec![Sparse::new(); l.dim()];
    let mut h_cols = vec![Sparse::new(); l.dim()];
    for (&(w, deg), block) in &blocks {
        let prev = blocks.get(&(w, deg - 1)).cloned().unwrap_or_default();
        let prev_c = complements.get(&(w, deg - 1)).cloned().unwrap_or_default();
        let b: Vec<Vec<Q>> = prev_c.iter().map(|c| coords(block, &delta.apply_sparse(&to_sparse(&prev, c)))).collect();
        let h_part = extend_basis(&b, &cycles[&(w, deg)], block.len());
        let c = &complements[&(w, deg)];
        let frame: Vec<Vec<Q>> = b.iter().chain(&h_part).chain(c).cloned().collect();
        // columns of the frame are the new basis; invert to read coordinates
        let cols: Matrix = (0..block.len()).map(|r| frame.iter().map(|v| v[r].clone()).collect()).collect();
        let inv = inverse(&cols).ok_or_else(|| Error::Internal("Hodge frame is singular".into()))?;
        let first_m = m_basis.len();
        for v in &h_part {
            m_basis.push(BasisElement { name: format!("h{}", m_basis.len()), degree: deg, weight: w });
            f_cols.push(to_sparse(block, v));
        }
        for (k, &i) in block.iter().enumerate() {
            let coord: Vec<Q> = inv.iter().map(|row| row[k].clone()).collect();
            let mut g = Sparse::new();
            for (t, x) in coord[b.len()..b.len() + h_part.len()].iter().enumerate() {
                if !x.is_zero() {
                    g.insert(first_m + t, x.clone());
                }
            }
            g_cols[i] = g;
            let mut h = Sparse::new();
            for (t, x) in coord[..b.len()].iter().enumerate() {
                if !x.is_zero() {
                    for (j, y) in to_sparse(&prev, &prev_c[t]) {
                        let e = h.entry(j).or_insert_with(Q::zero);
                        *e += x * y;
                    }
                }
            }
            h.retain(|_, v| !v.is_zero());
            h_cols[i] = h;
        }
    }
    let m = Space::from_basis("H", m_basis, l.filtration_length())?;
    let f = LinMap::from_columns(&m, l, 0, f_cols);
    let g = LinMap::from_columns(l, &m, 0, g_cols);
    let h = LinMap::from_columns(l, l, -1, h_cols);
    Context::new(delta.clone(), LinMap::zero(&m, &m, 1), f, g, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::dgla::{core_from_dgla, default_degrees, matrix_dgla, tensor_nilpotent};
    use crate::fixtures::named::fix_b_structure;
    use crate::scalar::qi;
    use crate::transfer::transfer;

    #[test]
    fn fix_b_hodge_context_is_the_named_one_up_to_names() {
        let s = fix_b_structure();
        let ctx = hodge_context(s.delta()).unwrap();
        assert_eq!(ctx.small().dim(), 3);
        let t = transfer(&ctx, &s).unwrap();
        assert!(t.is_exact());
        assert!(t.mu.is_zero());
        let f = crate::symop::embed_linmap(ctx.f()).unwrap();
        assert!(!t.big_f.try_sub(&f).unwrap().is_zero());
    }

    #[test]
    fn tensor_matrix_transfer_is_exact() {
        let g = matrix_dgla(&default_degrees(4), 3, &[(0, qi(1))]).unwrap();
        let core = core_from_dgla(&g, "c").unwrap();
        let s = tensor_nilpotent(&core, "T", 5, 1).unwrap();
        let ctx = hodge_context(s.delta()).unwrap();
        assert!(ctx.small().dim() < s.space().dim());
        let t = transfer(&ctx, &s).unwrap();
        assert!(t.is_exact(), "{:?}", t.residuals.nonzero());
    }
}
