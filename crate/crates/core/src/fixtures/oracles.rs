//! Maurer–Cartan elements obtained without the transfer: gauge orbits, one-dimensional
//! enumeration and the linear regime.

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::fixtures::random::random_q_or_zero;
use crate::linalg::{nullspace, Matrix};
use crate::linmap::LinMap;
use crate::scalar::{factorial, Q};
use crate::space::{sparse_add_scaled, Sparse, Vector};
use crate::structure::{mc_residual, CurvedStructure};

fn require_dgla(s: &CurvedStructure) -> Result<()> {
    if !s.is_flat() {
        return Err(Error::NotFlat);
    }
    for (n, c) in s.lambda().components().iter().enumerate() {
        if n != 2 && !c.is_zero() {
            return Err(Error::NotDgla(format!("bracket of arity {n} is nonzero")));
        }
    }
    Ok(())
}

/// The gauge action of `exp(z)` on `base` (default `0`) in a DGLA-type structure:
/// `Σ ad_z^n(x₀)/n! − Σ ad_z^n(δz)/(n+1)!` with `ad_z = −λ_2(z, ·)`.
/// The result is always checked against the Maurer–Cartan equation.
pub fn gauge_orbit_mc(s: &CurvedStructure, z: &Vector, base: Option<&Vector>) -> Result<Vector> {
    require_dgla(s)?;
    s.space().ensure_same(z.space())?;
    if !z.is_homogeneous_of(-1) {
        return Err(Error::DegreeMismatch("gauge parameters have degree -1".into()));
    }
    let x0 = match base {
        Some(x) => {
            let r = mc_residual(x, s)?;
            if !r.is_zero() {
                return Err(Error::NotMC(r.to_string()));
            }
            x.clone()
        }
        None => Vector::zero(s.space()),
    };
    let bracket = s.lambda().component(2).expect("arity 2 exists when N > 2");
    let ad = |v: &Vector| -> Result<Vector> { Ok(bracket.eval(&[z.clone(), v.clone()])?.scale(&-Q::one())) };
    let bound = s.space().filtration_length() as usize;
    let mut acc = Sparse::new();
    let mut term = x0;
    for n in 0..=bound {
        sparse_add_scaled(&mut acc, term.sparse(), &(Q::one() / factorial(n)));
        term = ad(&term)?;
    }
    let mut term = s.delta().apply(z)?;
    for n in 0..=bound {
        sparse_add_scaled(&mut acc, term.sparse(), &(-Q::one() / factorial(n + 1)));
        term = ad(&term)?;
    }
    let x = Vector::from_sparse(s.space(), acc);
    let r = mc_residual(&x, s)?;
    if !r.is_zero() {
        return Err(Error::OracleMismatch(format!("gauge image {x} has residual {r}")));
    }
    Ok(x)
}

/// Maurer–Cartan elements when the degree-0 part is spanned by one element `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum McLine {
    /// Every `t·a` is Maurer–Cartan.
    All(Vector),
    Points(Vec<Vector>),
}

/// Solves the Maurer–Cartan equation on a one-dimensional degree-0 part by the rational root
/// test, each candidate being checked exactly.
pub fn mc_enumerate_1d(s: &CurvedStructure) -> Result<McLine> {
    let space = s.space();
    let zero_degree = space.indices_of_degree(0);
    if zero_degree.len() != 1 {
        return Err(Error::NotOneDimensional(zero_degree.len()));
    }
    let a = Vector::unit(space, zero_degree[0]);
    let mut coeffs: Vec<Vector> = Vec::new();
    for (n, c) in s.lambda().components().iter().enumerate() {
        let mut v = c.eval(&vec![a.clone(); n])?.scale(&(Q::one() / factorial(n)));
        if n == 1 {
            v = v.try_add(&s.delta().apply(&a)?)?;
        }
        coeffs.push(v);
    }
    if coeffs.len() < 2 {
        coeffs.resize(2, Vector::zero(space));
        coeffs[1] = s.delta().apply(&a)?;
    }
    let Some(coord) = coeffs.iter().find_map(|v| v.sparse().keys().next().copied()) else {
        return Ok(McLine::All(a));
    };
    let poly: Vec<Q> = coeffs.iter().map(|v| v.sparse().get(&coord).cloned().unwrap_or_default()).collect();
    let mut points = Vec::new();
    for t in rational_roots(&poly)? {
        let x = a.scale(&t);
        if mc_residual(&x, s)?.is_zero() {
            points.push(x);
        }
    }
    Ok(McLine::Points(points))
}

fn divisors(n: &BigInt) -> Result<Vec<u64>> {
    let n = n.abs().to_u64().ok_or_else(|| Error::Internal("coefficient too large for root search".into()))?;
    let mut out = Vec::new();
    let mut k = 1;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            if k * k != n {
                out.push(n / k);
            }
        }
        k += 1;
    }
    out.sort_unstable();
    Ok(out)
}

/// All rational roots of a polynomial with coefficients listed from the constant term up.
fn rational_roots(poly: &[Q]) -> Result<Vec<Q>> {
    let lcm = poly.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = poly.iter().map(|c| (c * Q::from_integer(lcm.clone())).to_integer()).collect();
    let low = ints.iter().position(|c| !c.is_zero()).expect("nonzero polynomial");
    let high = ints.iter().rposition(|c| !c.is_zero()).expect("nonzero polynomial");
    let mut roots = Vec::new();
    if low > 0 {
        roots.push(Q::zero());
    }
    let eval = |t: &Q| ints[low..=high].iter().rev().fold(Q::zero(), |acc, c| acc * t + Q::from_integer(c.clone()));
    for p in divisors(&ints[low])? {
        for q in divisors(&ints[high])? {
            for sign in [1i64, -1] {
                let t = Q::new(BigInt::from(sign) * BigInt::from(p), BigInt::from(q));
                if eval(&t).is_zero() && !roots.contains(&t) {
                    roots.push(t);
                }
            }
        }
    }
    roots.sort();
    Ok(roots)
}

/// Random degree-0 Maurer–Cartan elements whose support has weight `>= N/2`, where every
/// bracket of arity `>= 2` vanishes for filtration reasons: combinations of the kernel of
/// `δ + λ_1`, and of `h` when given.
pub fn linear_regime_samples<R: Rng>(
    rng: &mut R,
    s: &CurvedStructure,
    h: Option<&LinMap>,
    count: usize,
) -> Result<Vec<Vector>> {
    if !s.is_flat() {
        return Err(Error::NotFlat);
    }
    let space = s.space();
    let n = space.filtration_length();
    let support: Vec<usize> = space.indices_of_degree(0).into_iter().filter(|&i| 2 * space.weight(i) >= n).collect();
    if support.is_empty() {
        return Ok(Vec::new());
    }
    let lambda_1 = s.lambda().component(1).cloned();
    let mut rows: Matrix = Vec::new();
    let mut images: Vec<Vec<Sparse>> = Vec::new();
    for &i in &support {
        let e = Vector::unit(space, i);
        let mut v = s.delta().apply(&e)?;
        if let Some(l1) = &lambda_1 {
            v = v.try_add(&l1.eval(&[e.clone()])?)?;
        }
        let mut cols = vec![v.into_sparse()];
        if let Some(h) = h {
            cols.push(h.apply(&e)?.into_sparse());
        }
        images.push(cols);
    }
    for part in 0..images[0].len() {
        for j in 0..space.dim() {
            let row: Vec<Q> = images.iter().map(|c| c[part].get(&j).cloned().unwrap_or_default()).collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }
    let kernel = if rows.is_empty() {
        (0..support.len()).map(|k| (0..support.len()).map(|j| if j == k { Q::one() } else { Q::zero() }).collect()).collect()
    } else {
        nullspace(&rows, support.len())
    };
    if kernel.is_empty() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for _ in 0..count {
        let mut acc = Sparse::new();
        for k in &kernel {
            let c = random_q_or_zero(rng);
            let v: Sparse = support.iter().zip(k).filter(|(_, x)| !x.is_zero()).map(|(&i, x)| (i, x.clone())).collect();
            sparse_add_scaled(&mut acc, &v, &c);
        }
        let x = Vector::from_sparse(space, acc);
        let r = mc_residual(&x, s)?;
        if !r.is_zero() {
            return Err(Error::OracleMismatch(format!("linear-regime sample {x} has residual {r}")));
        }
        out.push(x);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::dgla::{default_degrees, matrix_dgla};
    use crate::fixtures::named::{fix_a, fix_b_structure};
    use crate::fixtures::random::{random_vector, rng};
    use crate::scalar::qi;
    use crate::structure::from_dgla;

    #[test]
    fn fix_a_has_two_points() {
        let s = fix_a();
        let a = Vector::basis(s.space(), "a").unwrap();
        assert_eq!(mc_enumerate_1d(&s).unwrap(), McLine::Points(vec![a.scale(&qi(-2)), Vector::zero(s.space())]));
        assert!(matches!(mc_enumerate_1d(&fix_b_structure()), Err(Error::NotOneDimensional(6))));
    }

    #[test]
    fn gauge_orbits_are_mc() {
        let g = matrix_dgla(&default_degrees(4), 3, &[(0, qi(1))]).unwrap();
        let s = from_dgla(&g, "L").unwrap();
        let mut r = rng(5);
        let mut nonzero = 0;
        for _ in 0..10 {
            let z = random_vector(&mut r, s.space(), -1, 1, 0.8);
            let x = gauge_orbit_mc(&s, &z, None).unwrap();
            let y = gauge_orbit_mc(&s, &z, Some(&x)).unwrap();
            nonzero += usize::from(!y.is_zero());
        }
        assert!(nonzero > 0);
        assert!(matches!(gauge_orbit_mc(&fix_a(), &Vector::zero(fix_a().space()), None), Err(Error::NotDgla(_))));
    }

    #[test]
    fn rational_roots_of_small_polynomials() {
        // 6t^3 - 5t^2 + t = t(2t - 1)(3t - 1)
        let roots = rational_roots(&[qi(0), qi(1), qi(-5), qi(6)]).unwrap();
        assert_eq!(roots, vec![qi(0), Q::new(1.into(), 3.into()), Q::new(1.into(), 2.into())]);
    }
}
