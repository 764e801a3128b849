//! The property suite behind `linfty selftest`: every identity at exact zero, with a
//! deterministic transcript.

use rand_chacha::ChaCha8Rng;

use crate::calculus::{bullet, circle, circle_b, delta_lambda};
use crate::context::perturb_context;
use crate::error::Result;
use crate::fixtures::generate::{kuranishi_fixture, random_context, random_pair, random_perturbation, ContextRecipe};
use crate::fixtures::random::{random_degree, random_differential, random_inhom, random_op, random_spaces, random_spaces_with, rng};
use crate::fixtures::samples::{kuranishi_samples, mc_samples};
use crate::scalar::sign;
use crate::symop::{embed_linmap, hom_differential, InhomOp};
use crate::transfer::{solve_f_global, transfer, verify_bijection};

/// Outcome of one instance: `None` when every identity holds, otherwise the first failure.
/// The size is the number of nonzero entries handled, recorded in the transcript.
pub struct Instance {
    pub failure: Option<String>,
    pub size: usize,
}

fn check(failures: &mut Vec<String>, ok: bool, name: &str) {
    if !ok {
        failures.push(name.to_string());
    }
}

fn done(failures: Vec<String>, size: usize) -> Result<Instance> {
    Ok(Instance { failure: failures.into_iter().next(), size })
}

const ATTEMPTS: usize = 256;

/// Redraws until an instance exercises its identity on nonzero operators (`size > 0`).
fn nontrivial(r: &mut ChaCha8Rng, draw: fn(&mut ChaCha8Rng) -> Result<Instance>) -> Result<Instance> {
    for _ in 0..ATTEMPTS {
        let inst = draw(r)?;
        if inst.failure.is_some() || inst.size > 0 {
            return Ok(inst);
        }
    }
    Ok(Instance { failure: Some(format!("no nontrivial instance in {ATTEMPTS} draws")), size: 0 })
}

fn pre_lie_draw(r: &mut ChaCha8Rng) -> Result<Instance> {
    let s = random_spaces(r, &["L", "M"], 3);
    let (l, m) = (&s[0], &s[1]);
    let da = random_degree(r);
    let a = random_op(r, l, m, da);
    let (db, dc) = (random_degree(r), random_degree(r));
    let b = random_op(r, l, l, db);
    let c = random_op(r, l, l, dc);
    let lhs = circle(&circle(&a, &b)?, &c)?.try_sub(&circle(&a, &circle(&b, &c)?)?)?;
    let rhs = circle(&circle(&a, &c)?, &b)?.try_sub(&circle(&a, &circle(&c, &b)?)?)?;
    let defect = lhs.add_scaled(&rhs, &-sign((db * dc) as i64))?;
    let mut f = Vec::new();
    check(&mut f, defect.is_zero(), "pre-Lie");
    done(f, lhs.nnz())
}

pub fn pre_lie(r: &mut ChaCha8Rng) -> Result<Instance> {
    nontrivial(r, pre_lie_draw)
}

fn composition_draw(r: &mut ChaCha8Rng) -> Result<Instance> {
    let s = random_spaces(r, &["J", "K", "L", "M"], 3);
    let (j, k, l, m) = (&s[0], &s[1], &s[2], &s[3]);
    let da = random_degree(r);
    let a = random_op(r, l, m, da);
    let b = random_op(r, k, l, 0);
    let c = random_op(r, j, k, 0);
    let beta = random_op(r, k, l, 1);
    let mut f = Vec::new();
    let ab = bullet(&a, &b)?;
    let abc = bullet(&ab, &c)?;
    check(&mut f, abc == bullet(&a, &bullet(&b, &c)?)?, "associativity");
    check(&mut f, bullet(&a, &InhomOp::identity(l))? == a, "right unit");
    check(&mut f, bullet(&InhomOp::identity(l), &b)? == b, "left unit");
    let based = circle_b(&a, &b, &beta)?;
    let lhs = bullet(&based, &c)?;
    check(&mut f, lhs == circle_b(&a, &bullet(&b, &c)?, &bullet(&beta, &c)?)?, "base change");
    let beta_l = random_op(r, l, l, 1);
    let eps = circle(&a, &beta_l)?;
    check(&mut f, circle_b(&a, &InhomOp::identity(l), &beta_l)? == eps, "epsilon unit");
    let (dk, dl, dm) = (random_differential(r, k), random_differential(r, l), random_differential(r, m));
    let chain = hom_differential(&ab, &dk, &dm)?;
    let t1 = bullet(&hom_differential(&a, &dl, &dm)?, &b)?;
    let t2 = circle_b(&a, &b, &hom_differential(&b, &dk, &dl)?)?;
    check(&mut f, chain == t1.add_scaled(&t2, &sign(da as i64))?, "chain rule");
    let witnesses = [abc.nnz(), lhs.nnz(), eps.nnz(), t1.nnz() + t2.nnz()];
    let size = if witnesses.contains(&0) { 0 } else { witnesses.iter().sum() };
    done(f, size)
}

pub fn composition(r: &mut ChaCha8Rng) -> Result<Instance> {
    nontrivial(r, composition_draw)
}

fn twisted_draw(r: &mut ChaCha8Rng) -> Result<Instance> {
    let l = &random_spaces_with(r, &["L"], 4, &[0, 1, 2])[0];
    let d = random_differential(r, l);
    let top = InhomOp::max_arity_for(l);
    let lambda = random_inhom(r, l, l, 1, 1, 0.8, 0..=top);
    let dx = random_degree(r);
    let x = random_op(r, l, l, dx);
    let twice = delta_lambda(&delta_lambda(&x, &lambda, &d)?, &lambda, &d)?;
    let curv = hom_differential(&lambda, &d, &d)?.try_add(&circle(&lambda, &lambda)?)?;
    let expected = circle(&curv, &x)?.try_sub(&circle(&x, &curv)?)?;
    let mut f = Vec::new();
    check(&mut f, twice == expected, "twisted differential squares to the curvature commutator");
    done(f, twice.nnz())
}

pub fn twisted_differential(r: &mut ChaCha8Rng) -> Result<Instance> {
    nontrivial(r, twisted_draw)
}

pub fn perturbation(r: &mut ChaCha8Rng) -> Result<Instance> {
    let recipe = ContextRecipe::random(r);
    let ctx = random_context(r, &recipe);
    let mu = random_perturbation(r, &ctx)?;
    let p = perturb_context(&ctx, &mu)?;
    let mut f = Vec::new();
    check(&mut f, p.report().is_valid(), "perturbed context axioms");
    done(f, mu.nnz() + p.h().nnz())
}

pub fn fukaya(r: &mut ChaCha8Rng) -> Result<Instance> {
    let recipe = ContextRecipe::random(r);
    let (ctx, s) = random_pair(r, &recipe)?;
    let t = transfer(&ctx, &s)?;
    let n = ctx.big().filtration_length() as usize;
    let mut f = Vec::new();
    check(&mut f, t.iterations.iter().all(|&k| k <= n), "stabilization bound");
    for (name, residual) in t.residuals.named() {
        check(&mut f, residual.is_zero(), name);
    }
    check(&mut f, solve_f_global(&ctx, &s)?.0 == t.big_f, "arity-major and global solutions agree");
    done(f, t.big_f.nnz() + t.mu.nnz())
}

pub fn linear(r: &mut ChaCha8Rng) -> Result<Instance> {
    let recipe = ContextRecipe::random(r);
    let ctx = random_context(r, &recipe);
    let mu = random_perturbation(r, &ctx)?;
    let p = perturb_context(&ctx, &mu)?;
    let s = crate::structure::CurvedStructure::new(ctx.delta().clone(), embed_linmap(&mu)?)?;
    let t = transfer(&ctx, &s)?;
    let mut f = Vec::new();
    check(&mut f, t.big_f == embed_linmap(p.f())?, "F = f_mu");
    check(&mut f, t.mu == embed_linmap(&p.d().try_sub(ctx.d())?)?, "transferred mu = d_mu - d");
    done(f, t.big_f.nnz() + t.mu.nnz())
}

pub fn round_trips(r: &mut ChaCha8Rng) -> Result<Instance> {
    let k = kuranishi_fixture(r)?;
    let t = transfer(&k.context, &k.structure)?;
    let small = mc_samples(r, &k.small, 4)?;
    let big = kuranishi_samples(r, &t, &small, 6)?;
    let report = verify_bijection(&t, &small, &big);
    let mut f = Vec::new();
    check(&mut f, t.is_exact(), "transfer residuals");
    check(&mut f, &t.mu == k.small.lambda(), "transferred mu equals the matrix bracket");
    check(&mut f, report.all_exact(), "round trips");
    done(f, small.iter().chain(&big).map(|x| x.sparse().len()).sum())
}

pub type Property = fn(&mut ChaCha8Rng) -> Result<Instance>;

pub const PROPERTIES: &[(&str, Property)] = &[
    ("pre_lie", pre_lie),
    ("composition", composition),
    ("twisted_differential", twisted_differential),
    ("perturbation", perturbation),
    ("fukaya", fukaya),
    ("linear_cross_check", linear),
    ("round_trips", round_trips),
];

/// Runs every property `iters` times; instance `i` of property `p` uses its own seeded stream.
/// Returns the transcript and whether everything passed.
pub fn run(seed: u64, iters: usize) -> (String, bool) {
    let mut out = format!("linfty selftest seed={seed} iters={iters}\n");
    let mut all = true;
    for (p, (name, prop)) in PROPERTIES.iter().enumerate() {
        let mut passed = 0;
        let mut size = 0;
        let mut first = None;
        for i in 0..iters {
            let mut r = rng(seed.wrapping_mul(1_000_003).wrapping_add((p as u64) << 32).wrapping_add(i as u64));
            match prop(&mut r) {
                Ok(Instance { failure: None, size: s }) => {
                    passed += 1;
                    size += s;
                }
                Ok(Instance { failure: Some(why), .. }) => {
                    first.get_or_insert(format!("instance {i}: {why}"));
                }
                Err(e) => {
                    first.get_or_insert(format!("instance {i}: {e}"));
                }
            }
        }
        let status = if passed == iters { "ok" } else { "FAIL" };
        out.push_str(&format!("{name:<22} {passed:>4}/{iters:<4} entries={size:<8} {status}\n"));
        if let Some(why) = first {
            out.push_str(&format!("  first failure: {why}\n"));
        }
        all &= passed == iters;
    }
    out.push_str(if all { "result ok\n" } else { "result FAIL\n" });
    (out, all)
}
