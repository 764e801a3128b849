//! Certified Maurer–Cartan samples on either side of a transfer.

use rand::Rng;

use crate::calculus::mc_apply;
use crate::error::Result;
use crate::fixtures::oracles::{gauge_orbit_mc, linear_regime_samples, mc_enumerate_1d, McLine};
use crate::fixtures::random::{random_q, random_vector};
use crate::structure::{mc_residual, CurvedStructure};
use crate::space::Vector;
use crate::transfer::TransferResult;

fn push(out: &mut Vec<Vector>, x: Vector, k: usize) {
    if out.len() < k && !out.contains(&x) {
        out.push(x);
    }
}

fn is_dgla(s: &CurvedStructure) -> bool {
    s.is_flat() && s.lambda().components().iter().enumerate().all(|(n, c)| n == 2 || c.is_zero())
}

/// Up to `k` elements of `MC(s)`, each confirmed by its residual: zero, the one-dimensional
/// enumeration, gauge orbits, the linear regime, then random degree-0 candidates.
pub fn mc_samples<R: Rng>(rng: &mut R, s: &CurvedStructure, k: usize) -> Result<Vec<Vector>> {
    let space = s.space();
    let mut out = Vec::new();
    if s.is_flat() {
        push(&mut out, Vector::zero(space), k);
    }
    if space.indices_of_degree(0).len() == 1 {
        match mc_enumerate_1d(s)? {
            McLine::Points(points) => points.into_iter().for_each(|x| push(&mut out, x, k)),
            McLine::All(a) => {
                for _ in 0..k {
                    push(&mut out, a.scale(&random_q(rng)), k);
                }
            }
        }
    }
    if is_dgla(s) && !space.indices_of_degree(-1).is_empty() {
        for _ in 0..k {
            let z = random_vector(rng, space, -1, 1, 0.7);
            push(&mut out, gauge_orbit_mc(s, &z, None)?, k);
        }
    }
    if s.is_flat() {
        for x in linear_regime_samples(rng, s, None, k)? {
            push(&mut out, x, k);
        }
    }
    for _ in 0..4 * k {
        if out.len() >= k {
            break;
        }
        let x = random_vector(rng, space, 0, 1, 0.6);
        if mc_residual(&x, s)?.is_zero() {
            push(&mut out, x, k);
        }
    }
    Ok(out)
}

/// Kuranishi-set samples: pushforwards of `small` along `F`, then linear-regime elements
/// killed by `h`.
pub fn kuranishi_samples<R: Rng>(rng: &mut R, tr: &TransferResult, small: &[Vector], k: usize) -> Result<Vec<Vector>> {
    let mut out = Vec::new();
    for x in small {
        push(&mut out, mc_apply(&tr.big_f, x)?, k);
    }
    if tr.structure.is_flat() {
        for y in linear_regime_samples(rng, &tr.structure, Some(tr.context.h()), k)? {
            push(&mut out, y, k);
        }
    }
    Ok(out)
}
