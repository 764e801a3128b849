//! Random contexts, structures and perturbations that satisfy their axioms by construction.

use num::One;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::calculus::{bullet, circle};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::fixtures::dgla::matrix_dgla;
use crate::fixtures::random::{random_inhom, random_linmap, random_q};
use crate::linmap::LinMap;
use crate::scalar::Q;
use crate::space::{BasisElement, Space, Sparse, Vector};
use crate::structure::{from_dgla, CurvedStructure};
use crate::symop::{embed_linmap, InhomOp, SymOp};

/// Shape of a generated context.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContextRecipe {
    pub n: u32,
    /// Elements of `M` with `d = 0`.
    pub free: usize,
    /// Pairs `p → q` in `M`.
    pub m_pairs: usize,
    /// Contractible pairs `u → v` in `L`.
    pub l_pairs: usize,
    pub degrees: Vec<i32>,
}

impl ContextRecipe {
    pub fn random<R: Rng>(rng: &mut R) -> ContextRecipe {
        ContextRecipe {
            n: rng.gen_range(4..=5),
            free: rng.gen_range(2..=3),
            m_pairs: rng.gen_range(0..=1),
            l_pairs: rng.gen_range(1..=2),
            degrees: vec![-1, 0, 0, 0, 1, 1, 2],
        }
    }
}

struct Raw {
    context: Context,
    /// Indices in `M` of the `p` and `q` elements.
    sources: Vec<usize>,
    targets: Vec<usize>,
    /// Indices in `L` of the `v` elements.
    boundaries: Vec<usize>,
}

fn pick_degree<R: Rng>(rng: &mut R, degrees: &[i32], parity: Option<i32>) -> i32 {
    let allowed: Vec<i32> = degrees.iter().copied().filter(|d| parity.map_or(true, |p| d.rem_euclid(2) == p)).collect();
    if allowed.is_empty() {
        parity.unwrap_or(0)
    } else {
        allowed[rng.gen_range(0..allowed.len())]
    }
}

/// Weights biased towards the bottom of the filtration, so that brackets have room to land.
fn low_weight<R: Rng>(rng: &mut R, n: u32) -> u32 {
    rng.gen_range(1..n).min(rng.gen_range(1..n))
}

fn element(name: String, degree: i32, weight: u32) -> BasisElement {
    BasisElement { name, degree, weight }
}

fn images(src: &Space, tgt: &Space, degree: i32, pairs: &[(String, Vector)]) -> LinMap {
    let refs: Vec<(&str, Vector)> = pairs.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
    LinMap::from_images(src, tgt, degree, &refs).expect("generated names")
}

fn scaled(space: &Space, name: &str, c: &Q) -> Vector {
    Vector::basis(space, name).expect("generated name").scale(c)
}

/// `M` = free elements plus pairs `p_i → q_i` whose sources share one parity; `L = M ⊕` pairs
/// `u_i → v_i` of equal weight. `f`, `g` are inclusion and projection and `h(v_i) = u_i / c_i`.
fn raw_context<R: Rng>(rng: &mut R, recipe: &ContextRecipe, parity: i32) -> Raw {
    let n = recipe.n;
    let mut m_basis = Vec::new();
    let mut d_pairs = Vec::new();
    for i in 0..recipe.free {
        m_basis.push(element(format!("m{i}"), pick_degree(rng, &recipe.degrees, None), low_weight(rng, n)));
    }
    for i in 0..recipe.m_pairs {
        let deg = pick_degree(rng, &recipe.degrees, Some(parity));
        let w = low_weight(rng, n);
        m_basis.push(element(format!("p{i}"), deg, w));
        m_basis.push(element(format!("q{i}"), deg + 1, rng.gen_range(w..n)));
        d_pairs.push((format!("p{i}"), format!("q{i}"), random_q(rng)));
    }
    let mut l_basis = m_basis.clone();
    let mut h_pairs = Vec::new();
    for i in 0..recipe.l_pairs {
        let deg = pick_degree(rng, &recipe.degrees, None);
        let w = rng.gen_range(1..n);
        l_basis.push(element(format!("u{i}"), deg, w));
        l_basis.push(element(format!("v{i}"), deg + 1, w));
        h_pairs.push((format!("u{i}"), format!("v{i}"), random_q(rng)));
    }
    l_basis.shuffle(rng);
    let m = Space::from_basis("M", m_basis, n).expect("generated weights are in range");
    let l = Space::from_basis("L", l_basis, n).expect("generated weights are in range");

    let d = images(&m, &m, 1, &d_pairs.iter().map(|(p, q, c)| (p.clone(), scaled(&m, q, c))).collect::<Vec<_>>());
    let mut delta_images: Vec<(String, Vector)> = d_pairs.iter().map(|(p, q, c)| (p.clone(), scaled(&l, q, c))).collect();
    delta_images.extend(h_pairs.iter().map(|(u, v, c)| (u.clone(), scaled(&l, v, c))));
    let delta = images(&l, &l, 1, &delta_images);
    let names: Vec<String> = m.basis().iter().map(|b| b.name.clone()).collect();
    let f = images(&m, &l, 0, &names.iter().map(|x| (x.clone(), scaled(&l, x, &Q::one()))).collect::<Vec<_>>());
    let g = images(&l, &m, 0, &names.iter().map(|x| (x.clone(), scaled(&m, x, &Q::one()))).collect::<Vec<_>>());
    let h = images(&l, &l, -1, &h_pairs.iter().map(|(u, v, c)| (v.clone(), scaled(&l, u, &(Q::one() / c)))).collect::<Vec<_>>());
    let idx = |s: &Space, x: &str| s.index_of(x).expect("generated name");
    Raw {
        sources: d_pairs.iter().map(|(p, _, _)| idx(&m, p)).collect(),
        targets: d_pairs.iter().map(|(_, q, _)| idx(&m, q)).collect(),
        boundaries: h_pairs.iter().map(|(_, v, _)| idx(&l, v)).collect(),
        context: Context::new(delta, d, f, g, h).expect("raw context is valid by construction"),
    }
}

/// A random unipotent `P = 1 + U` of degree 0 and its inverse. `U` is strictly lower triangular
/// in the basis order; with `strict` it also raises weight.
pub fn unipotent<R: Rng>(rng: &mut R, space: &Space, strict: bool, density: f64) -> (LinMap, LinMap) {
    let columns: Vec<Sparse> = (0..space.dim())
        .map(|j| {
            let mut col = Sparse::new();
            col.insert(j, Q::one());
            for i in j + 1..space.dim() {
                let heavier = if strict { space.weight(i) > space.weight(j) } else { space.weight(i) >= space.weight(j) };
                if space.degree(i) == space.degree(j) && heavier && rng.gen_bool(density) {
                    col.insert(i, random_q(rng));
                }
            }
            col
        })
        .collect();
    let p = LinMap::from_columns(space, space, 0, columns);
    let minus_u = LinMap::identity(space).try_sub(&p).expect("same space");
    let mut inv = LinMap::identity(space);
    let mut power = LinMap::identity(space);
    for _ in 0..space.dim() {
        power = minus_u.compose(&power).expect("same space");
        inv = inv.try_add(&power).expect("same space");
    }
    (p, inv)
}

/// `δ' = aδa⁻¹`, `d' = bdb⁻¹`, `f' = afb⁻¹`, `g' = bga⁻¹`, `h' = aha⁻¹`.
pub fn conjugate_context(ctx: &Context, a: (&LinMap, &LinMap), b: (&LinMap, &LinMap)) -> Result<Context> {
    let (a, a_inv) = a;
    let (b, b_inv) = b;
    let c = |x: &LinMap, y: &LinMap, z: &LinMap| -> Result<LinMap> { x.compose(y)?.compose(z) };
    Context::new(
        c(a, ctx.delta(), a_inv)?,
        c(b, ctx.d(), b_inv)?,
        c(a, ctx.f(), b_inv)?,
        c(b, ctx.g(), a_inv)?,
        c(a, ctx.h(), a_inv)?,
    )
}

/// `x ↦ P λ(P⁻¹x, ..)`.
pub fn conjugate_op(op: &InhomOp, p: &LinMap, p_inv: &LinMap) -> Result<InhomOp> {
    bullet(&op.post_compose(p)?, &embed_linmap(p_inv)?)
}

/// Keeps only the entries whose inputs all satisfy `input` and the output coordinates in `output`.
fn restrict(op: &InhomOp, input: impl Fn(usize) -> bool, output: impl Fn(usize) -> bool) -> InhomOp {
    let mut out = InhomOp::zero(op.source(), op.target(), op.degree());
    for (n, comp) in op.components().iter().enumerate() {
        let mut c = SymOp::zero(op.source(), op.target(), n, op.degree());
        for (key, v) in comp.entries() {
            if key.iter().all(|&i| input(i)) {
                let kept: Sparse = v.iter().filter(|(&j, _)| output(j)).map(|(&j, q)| (j, q.clone())).collect();
                c.set_sorted(key.to_vec(), kept);
            }
        }
        out.set_component(n, c);
    }
    out
}

fn output_support(op: &InhomOp) -> Vec<usize> {
    let mut s: Vec<usize> = op.components().iter().flat_map(|c| c.entries().flat_map(|(_, v)| v.keys().copied())).collect();
    s.sort_unstable();
    s.dedup();
    s
}

fn linear_support(m: &LinMap) -> Vec<usize> {
    (0..m.source().dim()).flat_map(|i| m.column(i).keys().copied().collect::<Vec<_>>()).collect()
}

/// A random context: the raw context conjugated by unipotents on `L` and `M`.
pub fn random_context<R: Rng>(rng: &mut R, recipe: &ContextRecipe) -> Context {
    let parity = rng.gen_range(0..2);
    let raw = raw_context(rng, recipe, parity);
    let (p, p_inv) = unipotent(rng, raw.context.big(), false, 0.4);
    let (q, q_inv) = unipotent(rng, raw.context.small(), false, 0.4);
    conjugate_context(&raw.context, (&p, &p_inv), (&q, &q_inv)).expect("conjugation preserves the axioms")
}

/// A random pronilpotent curved structure on a random context.
///
/// On the raw context `L = f(M) ⊕ C` the structure is `δ + (fλ_M + κ)∙g`, where `λ_M` maps
/// multisets of `A` into `Z` for a split `M = A ⊕ Z` containing `d(M)` in `Z`, and `κ` lands in
/// `δ(C)` and avoids the outputs of `d` and `λ_M`. It is then transported along a nonlinear
/// automorphism with linear part `P`, and the context is conjugated by `P⁻¹`.
pub fn random_pair<R: Rng>(rng: &mut R, recipe: &ContextRecipe) -> Result<(Context, CurvedStructure)> {
    let parity = rng.gen_range(0..2);
    let (raw, base) = loop {
        let raw = raw_context(rng, recipe, parity);
        let ctx = &raw.context;
        let (l, m) = (ctx.big(), ctx.small());
        let top = InhomOp::max_arity_for(l);
        let mut in_z: Vec<bool> = (0..m.dim()).map(|_| rng.gen_bool(0.4)).collect();
        for &i in &raw.targets {
            in_z[i] = true;
        }
        for &i in &raw.sources {
            in_z[i] = false;
        }
        let lambda_m = random_inhom(rng, m, m, 1, 1, 0.7, 0..=top);
        let lambda_m = restrict(&lambda_m, |i| !in_z[i], |j| in_z[j]);
        let mut avoid = output_support(&lambda_m);
        avoid.extend(linear_support(ctx.d()));
        let kappa = random_inhom(rng, m, l, 1, 1, 0.7, 0..=top);
        let kappa = restrict(&kappa, |i| !avoid.contains(&i), |j| raw.boundaries.contains(&j));
        let base = bullet(&lambda_m.post_compose(ctx.f())?.try_add(&kappa)?, &embed_linmap(ctx.g())?)?;
        let higher = |op: &InhomOp| op.components().iter().skip(2).any(|c| !c.is_zero());
        if higher(&lambda_m) && higher(&kappa) {
            break (raw, base);
        }
    };
    let ctx = &raw.context;
    let (l, m) = (ctx.big().clone(), ctx.small().clone());
    let top = InhomOp::max_arity_for(&l);
    let base_total = embed_linmap(ctx.delta())?.try_add(&base)?;
    CurvedStructure::new(ctx.delta().clone(), base.clone())
        .map_err(|e| Error::Internal(format!("base structure: {e}")))?;

    let (p, p_inv) = unipotent(rng, &l, false, 0.4);
    let higher = random_inhom(rng, &l, &l, 0, 1, 0.5, 2..=top);
    let phi = embed_linmap(&p)?.try_add(&higher)?;
    let pulled = bullet(&base_total, &phi)?;
    let mut total = pulled.post_compose(&p_inv)?;
    for _ in 0..=top + 1 {
        let next = pulled.try_sub(&circle(&higher, &total)?)?.post_compose(&p_inv)?;
        if next == total {
            break;
        }
        total = next;
    }
    let delta = p_inv.compose(ctx.delta())?.compose(&p)?;
    let lambda = total.try_sub(&embed_linmap(&delta)?)?;
    let structure = CurvedStructure::new(delta, lambda).map_err(|e| Error::Internal(format!("transported structure: {e}")))?;
    structure.require_pronilpotent()?;
    let (q, q_inv) = unipotent(rng, &m, false, 0.4);
    let context = conjugate_context(ctx, (&p_inv, &p), (&q, &q_inv))?;
    Ok((context, structure))
}

/// A random perturbation `μ` of `δ` with `(δ + μ)² = 0` and weight shift `>= 1`:
/// `δ + μ = P(δ + fνg + δhχg)P⁻¹` with `ν` supported on the parity of the sources of `d` and
/// `χ` vanishing on the outputs of `d` and `ν`.
pub fn random_perturbation<R: Rng>(rng: &mut R, ctx: &Context) -> Result<LinMap> {
    let m = ctx.small();
    let d = ctx.d();
    let parities: Vec<i32> = (0..m.dim()).filter(|&i| !d.column(i).is_empty()).map(|i| m.degree(i).rem_euclid(2)).collect();
    let parity = match parities.first() {
        Some(&p) if parities.iter().all(|&x| x == p) => p,
        Some(_) => return Err(Error::Internal("d is nonzero on both parities".into())),
        None => rng.gen_range(0..2),
    };
    let mut mu = LinMap::zero(ctx.big(), ctx.big(), 1);
    for _ in 0..32 {
        let draw = random_linmap(rng, m, m, 1, 1, 0.5);
        let columns = (0..m.dim())
            .map(|i| if m.degree(i).rem_euclid(2) == parity { draw.column(i).clone() } else { Sparse::new() })
            .collect();
        let nu = LinMap::from_columns(m, m, 1, columns);
        let mut avoid = linear_support(d);
        avoid.extend(linear_support(&nu));
        let chi = random_linmap(rng, m, ctx.big(), 1, 1, 0.6);
        let columns = (0..m.dim()).map(|i| if avoid.contains(&i) { Sparse::new() } else { chi.column(i).clone() }).collect();
        let chi = LinMap::from_columns(m, ctx.big(), 1, columns);
        let exact = ctx.delta().compose(ctx.h())?.compose(&chi)?.compose(ctx.g())?;
        let lifted = ctx.f().compose(&nu)?.compose(ctx.g())?.try_add(&exact)?;
        let (p, p_inv) = unipotent(rng, ctx.big(), true, 0.5);
        let total = p.compose(&ctx.delta().try_add(&lifted)?)?.compose(&p_inv)?;
        mu = total.try_sub(ctx.delta())?;
        let mf = mu.compose(ctx.f())?;
        if !ctx.g().compose(&mf)?.is_zero() || !ctx.h().compose(&mf)?.is_zero() {
            break;
        }
    }
    Ok(mu)
}

/// A flat DGLA-type structure on `L = M ⊕ C` with `M` a nilpotent matrix DGLA, so that the
/// transferred structure is known: `μ = λ_M`.
#[derive(Debug, Clone)]
pub struct KuranishiFixture {
    pub context: Context,
    pub structure: CurvedStructure,
    /// `(M, d, λ_M)`, built independently of any transfer.
    pub small: CurvedStructure,
}

pub fn kuranishi_fixture<R: Rng>(rng: &mut R) -> Result<KuranishiFixture> {
    let size = rng.gen_range(3..=4);
    let (dgla, small) = loop {
        let degrees: Vec<i32> = (0..size).map(|_| rng.gen_range(0..=2)).collect();
        let mut q = Vec::new();
        let mut i = 0;
        while i + 1 < size {
            if degrees[i] - degrees[i + 1] == 1 && rng.gen_bool(0.8) {
                q.push((i, random_q(rng)));
                i += 2;
            } else {
                i += 1;
            }
        }
        let Ok(g) = matrix_dgla(&degrees, 3, &q) else { continue };
        if g.differential.is_zero() {
            continue;
        }
        let s = from_dgla(&g, "M")?;
        if s.lambda().is_zero() {
            continue;
        }
        break (g, s);
    };
    let m = small.space().clone();
    let n = m.filtration_length();
    let mut avoid = output_support(small.lambda());
    avoid.extend(linear_support(small.delta()));
    let free: Vec<usize> = (0..m.dim()).filter(|i| !avoid.contains(i)).collect();
    let mut targets = Vec::new();
    for (k, &a) in free.iter().enumerate() {
        for &b in &free[k..] {
            let repeated_odd = a == b && m.degree(a) % 2 != 0;
            if !repeated_odd && m.weight(a) + m.weight(b) + 1 < n {
                targets.push((m.degree(a) + m.degree(b) + 1, m.weight(a) + m.weight(b) + 1));
            }
        }
    }
    let pairs = rng.gen_range(1..=2);
    let mut l_basis = m.basis().to_vec();
    let mut h_pairs = Vec::new();
    for i in 0..pairs {
        let (deg, w) = match targets.len() {
            0 => (rng.gen_range(0..=2), rng.gen_range(1..n)),
            t if i == 0 => {
                let (deg, w) = targets[rng.gen_range(0..t)];
                (deg, rng.gen_range(w..n))
            }
            _ => (rng.gen_range(0..=2), rng.gen_range(1..n)),
        };
        l_basis.push(element(format!("u{i}"), deg - 1, w));
        l_basis.push(element(format!("v{i}"), deg, w));
        h_pairs.push((format!("u{i}"), format!("v{i}"), random_q(rng)));
    }
    l_basis.shuffle(rng);
    let l = Space::from_basis("L", l_basis, n)?;
    let names: Vec<String> = m.basis().iter().map(|b| b.name.clone()).collect();
    let d = small.delta().clone();
    let mut delta_images: Vec<(String, Vector)> = (0..m.dim())
        .map(|i| {
            let col = d.image_of_basis(i);
            let lifted = col.terms().fold(Vector::zero(&l), |acc, (x, c)| acc.try_add(&scaled(&l, x, c)).expect("same space"));
            (names[i].clone(), lifted)
        })
        .collect();
    delta_images.extend(h_pairs.iter().map(|(u, v, c)| (u.clone(), scaled(&l, v, c))));
    let delta = images(&l, &l, 1, &delta_images);
    let f = images(&m, &l, 0, &names.iter().map(|x| (x.clone(), scaled(&l, x, &Q::one()))).collect::<Vec<_>>());
    let g = images(&l, &m, 0, &names.iter().map(|x| (x.clone(), scaled(&m, x, &Q::one()))).collect::<Vec<_>>());
    let h = images(&l, &l, -1, &h_pairs.iter().map(|(u, v, c)| (v.clone(), scaled(&l, u, &(Q::one() / c)))).collect::<Vec<_>>());
    let raw = Context::new(delta, d, f, g, h)?;

    let boundaries: Vec<usize> = h_pairs.iter().map(|(_, v, _)| l.index_of(v).expect("generated name")).collect();
    let kappa = random_inhom(rng, &m, &l, 1, 1, 0.8, 2..=2);
    let kappa = restrict(&kappa, |i| !avoid.contains(&i), |j| boundaries.contains(&j));
    let lambda = bullet(&small.lambda().post_compose(raw.f())?.try_add(&kappa)?, &embed_linmap(raw.g())?)?;

    let (p, p_inv) = unipotent(rng, &l, false, 0.4);
    let context = conjugate_context(&raw, (&p, &p_inv), (&LinMap::identity(&m), &LinMap::identity(&m)))?;
    let structure = CurvedStructure::new(context.delta().clone(), conjugate_op(&lambda, &p, &p_inv)?)?;
    debug_assert_eq!(dgla.space.dim(), m.dim());
    Ok(KuranishiFixture { context, structure, small })
}
