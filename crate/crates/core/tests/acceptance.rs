mod common;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use linfty::calculus::mc_apply;
use linfty::context::{perturb_context, Context};
use linfty::fixtures::generate::{kuranishi_fixture, random_context, random_pair, random_perturbation, ContextRecipe};
use linfty::fixtures::named::{
    fix_a, fix_a_prime, fix_a_self_context, fix_b_context, fix_b_samples, fix_b_spaces, fix_b_structure,
    fix_c_perturbation,
};
use linfty::fixtures::oracles::{gauge_orbit_mc, mc_enumerate_1d, McLine};
use linfty::fixtures::random::{random_vector, rng};
use linfty::fixtures::samples::{kuranishi_samples, mc_samples};
use linfty::interchange::Document;
use linfty::linmap::LinMap;
use linfty::scalar::qi;
use linfty::selftest;
use linfty::space::{Space, Vector};
use linfty::structure::CurvedStructure;
use linfty::symop::{embed_linmap, InhomOp};
use linfty::transfer::{kuranishi_backward, kuranishi_forward, replay, transfer, verify_bijection};
use linfty::Error;

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn v(space: &Space, name: &str) -> Vector {
    Vector::basis(space, name).unwrap()
}

fn linfty(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linfty")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

fn write(dir: &Path, name: &str, doc: &Document) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, doc.to_text()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn calculus() -> Outcome {
    let properties: [(&str, selftest::Property); 3] = [
        ("pre-Lie", selftest::pre_lie),
        ("composition", selftest::composition),
        ("twisted differential", selftest::twisted_differential),
    ];
    let mut parts = Vec::new();
    for (name, prop) in properties {
        let mut entries = 0;
        for seed in 0..100 {
            let inst = prop(&mut rng(10_000 + seed)).map_err(|e| format!("{name} seed {seed}: {e}"))?;
            if let Some(why) = inst.failure {
                return Err(format!("{name} seed {seed}: {why}"));
            }
            entries += inst.size;
        }
        parts.push(format!("{name} 100/100 nontrivial ({entries} entries)"));
    }
    let mut nontrivial = 0;
    let mut seed = 0;
    while nontrivial < 100 {
        nontrivial += usize::from(common::engines_agree(seed)?);
        seed += 1;
    }
    parts.push(format!("brute force arity<=4 dim<=3 on {seed} instances, {nontrivial} nontrivial"));
    Ok(parts.join(", "))
}

fn perturbation_lemma() -> Outcome {
    let mut changed = 0;
    for seed in 0..100 {
        let mut r = rng(20_000 + seed);
        let recipe = ContextRecipe::random(&mut r);
        let ctx = random_context(&mut r, &recipe);
        let mu = random_perturbation(&mut r, &ctx).map_err(|e| e.to_string())?;
        let p = perturb_context(&ctx, &mu).map_err(|e| format!("seed {seed}: {e}"))?;
        let report = p.report();
        ensure(report.is_valid(), || format!("seed {seed}: {report}"))?;
        changed += usize::from(p.f() != ctx.f() || p.g() != ctx.g() || p.h() != ctx.h() || p.d() != ctx.d());
    }
    let c = perturb_context(&fix_b_context(), &fix_c_perturbation()).map_err(|e| e.to_string())?;
    let (l, m) = fix_b_spaces();
    let got = c.f().apply(&v(&m, "mbar1")).map_err(|e| e.to_string())?;
    let want = Vector::from_terms(&l, &[("m1", qi(1)), ("a2", qi(-1)), ("a3", qi(1))]).unwrap();
    ensure(got == want, || format!("FIX-C f_mu(mbar1) = {got:?}"))?;
    Ok(format!("100 random pairs valid ({changed} with a perturbed f, g, h or d), FIX-C f_mu(mbar t) = mt - at^2 + at^3"))
}

fn fukaya() -> Outcome {
    let mut nontrivial = 0;
    let mut max_iter = 0;
    for seed in 0..60 {
        let mut r = rng(30_000 + seed);
        let recipe = ContextRecipe::random(&mut r);
        let (ctx, st) = random_pair(&mut r, &recipe).map_err(|e| e.to_string())?;
        let t = transfer(&ctx, &st).map_err(|e| format!("seed {seed}: {e}"))?;
        let n = ctx.big().filtration_length() as usize;
        ensure(t.iterations.iter().all(|&k| k <= n), || format!("seed {seed}: iterations {:?} > {n}", t.iterations))?;
        max_iter = max_iter.max(t.iterations.iter().copied().max().unwrap_or(0));
        let res = &t.residuals;
        for (name, r) in [("fixed point", &res.fixed_point), ("gF - 1", &res.g_f), ("beta", &res.beta), ("alpha", &res.alpha)] {
            ensure(r.is_zero(), || format!("seed {seed}: {name} residual {r:?}"))?;
        }
        ensure(res.all_zero(), || format!("seed {seed}: {:?}", res.nonzero()))?;
        let higher = |op: &InhomOp| op.components().iter().skip(2).any(|c| !c.is_zero());
        nontrivial += usize::from(higher(&t.mu) && higher(&t.big_f));
    }
    ensure(nontrivial >= 30, || format!("only {nontrivial} pairs have higher F and mu"))?;
    let t = transfer(&fix_b_context(), &fix_b_structure()).map_err(|e| e.to_string())?;
    let (l, m) = fix_b_spaces();
    let x = v(&m, "mbar1");
    let f2 = t.big_f.eval(&[x.clone(), x]).map_err(|e| e.to_string())?;
    ensure(f2 == v(&l, "a3").scale(&qi(-1)), || format!("FIX-B F2 = {f2:?}"))?;
    ensure(t.mu.is_zero(), || "FIX-B mu is nonzero".into())?;
    Ok(format!("60 random pairs exact ({nontrivial} with higher F and mu, max {max_iter} iterations), FIX-B F2 = -at^3, mu = 0"))
}

fn linear_cross_check() -> Outcome {
    let (mut nonzero, mut moved) = (0, 0);
    for seed in 0..50 {
        let mut r = rng(40_000 + seed);
        let recipe = ContextRecipe::random(&mut r);
        let ctx = random_context(&mut r, &recipe);
        let mu = random_perturbation(&mut r, &ctx).map_err(|e| e.to_string())?;
        let p = perturb_context(&ctx, &mu).map_err(|e| e.to_string())?;
        let st = CurvedStructure::new(ctx.delta().clone(), embed_linmap(&mu).unwrap()).map_err(|e| e.to_string())?;
        let t = transfer(&ctx, &st).map_err(|e| format!("seed {seed}: {e}"))?;
        let want_f = embed_linmap(p.f()).unwrap();
        let want_mu = embed_linmap(&p.d().try_sub(ctx.d()).unwrap()).unwrap();
        ensure(t.big_f == want_f, || format!("seed {seed}: F differs from f_mu"))?;
        ensure(t.mu == want_mu, || format!("seed {seed}: mu differs from d_mu - d"))?;
        nonzero += usize::from(!t.mu.is_zero());
        moved += usize::from(p.f() != ctx.f());
    }
    Ok(format!("50 instances, F = f_mu and mu = d_mu - d ({nonzero} with mu != 0, {moved} with f_mu != f)"))
}

fn theorem() -> Outcome {
    let t = transfer(&fix_b_context(), &fix_b_structure()).map_err(|e| e.to_string())?;
    let report = verify_bijection(&t, &fix_b_samples(), &[]);
    ensure(report.small.len() == 4 && report.all_exact(), || format!("FIX-B {report:?}"))?;

    let a = fix_a();
    let sp = a.space().clone();
    let points = match mc_enumerate_1d(&a).map_err(|e| e.to_string())? {
        McLine::Points(p) => p,
        McLine::All(_) => return Err("FIX-A enumerated a whole line".into()),
    };
    let mut want = vec![Vector::zero(&sp), v(&sp, "a").scale(&qi(-2))];
    let mut got = points.clone();
    want.sort_by_key(|x| format!("{x:?}"));
    got.sort_by_key(|x| format!("{x:?}"));
    ensure(got == want, || format!("FIX-A MC set {points:?}"))?;
    let ta = transfer(&fix_a_self_context(), &a).map_err(|e| e.to_string())?;
    ensure(ta.big_f == InhomOp::identity(&sp), || "FIX-A F is not the identity".into())?;
    for x in &points {
        let y = kuranishi_forward(&ta, x).map_err(|e| e.to_string())?;
        ensure(&y == x && kuranishi_backward(&ta, &y).map_err(|e| e.to_string())? == *x, || format!("FIX-A moved {x:?}"))?;
    }

    let (mut gauge, mut pushed, mut total) = (0, 0, 0);
    for seed in 0..24 {
        let mut r = rng(50_000 + seed);
        let k = kuranishi_fixture(&mut r).map_err(|e| e.to_string())?;
        let t = transfer(&k.context, &k.structure).map_err(|e| e.to_string())?;
        ensure(t.is_exact(), || format!("seed {seed}: {:?}", t.residuals.nonzero()))?;
        let mut small = mc_samples(&mut r, &k.small, 4).map_err(|e| e.to_string())?;
        if !k.small.space().indices_of_degree(-1).is_empty() {
            for _ in 0..3 {
                let z = random_vector(&mut r, k.small.space(), -1, 1, 0.8);
                let x = gauge_orbit_mc(&k.small, &z, None).map_err(|e| format!("seed {seed}: {e}"))?;
                gauge += usize::from(!x.is_zero());
                small.push(x);
            }
        }
        for x in &small {
            let y = mc_apply(&t.big_f, x).map_err(|e| e.to_string())?;
            let hy = k.context.h().apply(&y).map_err(|e| e.to_string())?;
            ensure(hy.is_zero(), || format!("seed {seed}: h(F(x)) = {hy:?}"))?;
            pushed += 1;
        }
        let big = kuranishi_samples(&mut r, &t, &small, 8).map_err(|e| e.to_string())?;
        let report = verify_bijection(&t, &small, &big);
        ensure(report.all_exact(), || format!("seed {seed}: {report:?}"))?;
        total += report.small.len() + report.big.len();
    }
    ensure(gauge > 0, || "no nonzero gauge samples".into())?;
    Ok(format!(
        "FIX-B 4/4, FIX-A {{0, -2a}} with identity bijection, 24 fixtures: {total} round trips, {gauge} gauge samples, h(F(x)) = 0 on {pushed}"
    ))
}

fn with_context_maps(ctx: &Context, g: Option<LinMap>, h: Option<LinMap>) -> Context {
    Context::unchecked(
        ctx.delta().clone(),
        ctx.d().clone(),
        ctx.f().clone(),
        g.unwrap_or_else(|| ctx.g().clone()),
        h.unwrap_or_else(|| ctx.h().clone()),
    )
}

/// `λ_2(x, x) = y`, `λ_2(x, y) = z`: the arity-3 component of `λ∘λ` is nonzero.
fn jacobi_violation() -> (LinMap, InhomOp) {
    let sp = Space::new("J", &[("x", 0, 1), ("y", 1, 3), ("z", 2, 5)], 8).unwrap();
    let mut lambda = InhomOp::zero(&sp, &sp, 1);
    lambda.component_mut(2).add_named(&["x", "x"], &v(&sp, "y")).unwrap();
    lambda.component_mut(2).add_named(&["x", "y"], &v(&sp, "z")).unwrap();
    (LinMap::zero(&sp, &sp, 1), lambda)
}

fn non_pronilpotent() -> CurvedStructure {
    let sp = Space::new("P", &[("x", 0, 1), ("y", 1, 1)], 3).unwrap();
    let mut lambda = InhomOp::zero(&sp, &sp, 1);
    lambda.component_mut(1).add_named(&["x"], &v(&sp, "y")).unwrap();
    CurvedStructure::new(LinMap::zero(&sp, &sp, 1), lambda).unwrap()
}

fn negative() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ctx = fix_b_context();
    let (l, m) = fix_b_spaces();
    let mut lines = Vec::new();

    let bad_h = LinMap::from_images(&l, &l, -1, &[("b1", v(&l, "a1")), ("b2", v(&l, "a1")), ("b3", v(&l, "a3"))]).unwrap();
    let c = with_context_maps(&ctx, None, Some(bad_h));
    let lib = c.report();
    ensure(lib.violations.iter().any(|(name, _)| *name == "h"), || format!("non-filtered h not flagged: {lib}"))?;
    let p = write(d, "bad_h.json", &Document::from_context(&c));
    let out = linfty(&["validate", s(&p)]);
    ensure(code(&out) == 1, || format!("validate non-filtered h exit {}", code(&out)))?;
    lines.push("non-filtered h exit 1");

    let bad_g = LinMap::from_images(
        &l,
        &m,
        0,
        &[("m1", v(&m, "mbar1").scale(&qi(2))), ("m2", v(&m, "mbar2")), ("m3", v(&m, "mbar3"))],
    )
    .unwrap();
    let c = with_context_maps(&ctx, Some(bad_g), None);
    let err = Context::new(c.delta().clone(), c.d().clone(), c.f().clone(), c.g().clone(), c.h().clone());
    ensure(matches!(err, Err(Error::InvalidContext(_))), || format!("gf != 1 gave {err:?}"))?;
    let p = write(d, "bad_g.json", &Document::from_context(&c));
    let out = linfty(&["validate", s(&p)]);
    ensure(code(&out) == 1 && String::from_utf8_lossy(&out.stdout).contains("gf = 1"), || "gf != 1 not reported".into())?;
    lines.push("gf != 1 InvalidContext, exit 1");

    let (delta, lambda) = jacobi_violation();
    let err = CurvedStructure::new(delta.clone(), lambda.clone());
    ensure(matches!(err, Err(Error::StructureInvalid(_))), || format!("Jacobi violation gave {err:?}"))?;
    let p = write(d, "jacobi.json", &Document::from_structure(&CurvedStructure::unchecked(delta, lambda)));
    let out = linfty(&["validate", s(&p)]);
    ensure(code(&out) == 1 && String::from_utf8_lossy(&out.stdout).contains("structure residual arity 3"), || {
        "Jacobi violation not reported".into()
    })?;
    let (delta, lambda) = fix_a_prime();
    let p = write(d, "fix_a_prime.json", &Document::from_structure(&CurvedStructure::unchecked(delta, lambda)));
    let out = linfty(&["validate", s(&p)]);
    let text = String::from_utf8_lossy(&out.stdout);
    let arity_one = text.split("structure residual arity 1").nth(1).unwrap_or("");
    ensure(code(&out) == 1 && arity_one.split("\"name\"").next().unwrap_or("").contains("\"c\""), || {
        format!("FIX-A' report: {text}")
    })?;
    lines.push("Jacobi violation StructureInvalid, exit 1, FIX-A' names c");

    let ctx_p = write(d, "ctx.json", &Document::from_context(&ctx));
    let st_p = write(d, "st.json", &Document::from_structure(&fix_b_structure()));
    let res_p = d.join("result.json");
    let out = linfty(&["transfer", s(&ctx_p), s(&st_p), "--out", s(&res_p)]);
    ensure(code(&out) == 0, || format!("FIX-B transfer exit {}", code(&out)))?;
    let mut doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&res_p).unwrap()).unwrap();
    let entry = &mut doc["report"]["transfer"]["big_f"]["entries"][0]["value"];
    let key = entry.as_object().unwrap().keys().next().unwrap().clone();
    entry[&key] = "7/3".into();
    let tampered = d.join("tampered.json");
    std::fs::write(&tampered, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = linfty(&["bijection", s(&ctx_p), s(&st_p), "--result", s(&tampered)]);
    ensure(code(&out) == 1, || format!("tampered F exit {}", code(&out)))?;
    let out = linfty(&["bijection", s(&ctx_p), s(&st_p), "--result", s(&res_p)]);
    ensure(code(&out) == 0, || format!("untampered replay exit {}", code(&out)))?;
    let t = transfer(&ctx, &fix_b_structure()).unwrap();
    let mut f = t.big_f.clone();
    f.component_mut(2).add_named(&["mbar1", "mbar1"], &v(&l, "a3")).unwrap();
    let r = replay(&ctx, &fix_b_structure(), f, t.mu.clone()).unwrap();
    ensure(!r.residuals.fixed_point.is_zero(), || "tampered F passes the fixed-point check".into())?;
    lines.push("tampered F exit 1");

    let np = non_pronilpotent();
    let err = transfer(&Context::identity(np.delta()), &np);
    ensure(matches!(err, Err(Error::NotPronilpotent(_))), || format!("non-pronilpotent gave {err:?}"))?;
    let c = write(d, "np_ctx.json", &Document::from_context(&Context::identity(np.delta())));
    let st = write(d, "np.json", &Document::from_structure(&np));
    let out = linfty(&["transfer", s(&c), s(&st)]);
    ensure(code(&out) == 1 && String::from_utf8_lossy(&out.stderr).contains("NotPronilpotent"), || {
        format!("non-pronilpotent exit {}", code(&out))
    })?;
    lines.push("non-pronilpotent NotPronilpotent, exit 1");

    let text = std::fs::read_to_string(&st_p).unwrap().replacen("\"1/1\"", "\"1/0\"", 1);
    let bad = d.join("bad_rational.json");
    std::fs::write(&bad, text).unwrap();
    let out = linfty(&["validate", s(&bad)]);
    ensure(code(&out) == 2, || format!("1/0 exit {}", code(&out)))?;
    lines.push("1/0 exit 2");
    Ok(lines.join(", "))
}

fn determinism() -> Outcome {
    let run = || linfty(&["selftest", "--iters", "100", "--seed", "7"]);
    let (a, b) = (run(), run());
    ensure(code(&a) == 0, || String::from_utf8_lossy(&a.stdout).into_owned())?;
    ensure(a.stdout == b.stdout, || "transcripts differ".into())?;
    Ok(format!("selftest --iters 100 --seed 7 byte-identical ({} bytes)", a.stdout.len()))
}

fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    writeln!(err, "{line}").unwrap();
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("calculus identities", calculus),
        ("perturbation lemma", perturbation_lemma),
        ("transfer", fukaya),
        ("linear cross-check", linear_cross_check),
        ("Kuranishi bijection", theorem),
        ("negative tests", negative),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => report(&format!("criterion {} {name}: PASS [{secs:.1}s] {detail}", i + 1)),
            Err(why) => {
                report(&format!("criterion {} {name}: FAIL [{secs:.1}s] {why}", i + 1));
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
