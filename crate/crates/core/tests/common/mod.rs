#![allow(dead_code, unused_imports)]

pub mod oracle;

pub use linfty::fixtures::random::{random_differential as differential, random_op as op, random_spaces as spaces};

use linfty::calculus::{bullet, circle};
use linfty::fixtures::random::{random_degree, rng};
use linfty::space::Vector;

/// Compares the composition engines with the permutation-sum oracle on every ordered basis tuple
/// of arity at most 3 and every sorted tuple of arity 4. Returns whether the instance was
/// nontrivial.
pub fn engines_agree(seed: u64) -> Result<bool, String> {
    let mut r = rng(seed);
    let s = spaces(&mut r, &["K", "L", "M"], 3);
    let (k, l, m) = (&s[0], &s[1], &s[2]);
    let da = random_degree(&mut r);
    let a = op(&mut r, l, m, da);
    let db = random_degree(&mut r);
    let b = op(&mut r, l, l, db);
    let c = op(&mut r, k, l, 0);
    let ab = circle(&a, &b).map_err(|e| e.to_string())?;
    let ac = bullet(&a, &c).map_err(|e| e.to_string())?;
    let tuples = |sp, n| if n < 4 { oracle::tuples(sp, n) } else { oracle::sorted_tuples(sp, n) };
    for arity in 0..=4.min(ab.max_arity()) {
        for t in tuples(l, arity) {
            let units: Vec<Vector> = t.iter().map(|&i| Vector::unit(l, i)).collect();
            if ab.eval(&units).map_err(|e| e.to_string())? != oracle::circle_at(&a, &b, &t) {
                return Err(format!("circle seed {seed} tuple {t:?}"));
            }
        }
        for t in tuples(k, arity) {
            let units: Vec<Vector> = t.iter().map(|&i| Vector::unit(k, i)).collect();
            if ac.eval(&units).map_err(|e| e.to_string())? != oracle::bullet_at(&a, &c, &t) {
                return Err(format!("bullet seed {seed} tuple {t:?}"));
            }
        }
    }
    Ok(!ab.is_zero() && !ac.is_zero())
}
