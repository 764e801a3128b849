//! Contexts `(L, δ) ⇄ (M, d)` with homotopy `h`, and the perturbation lemma.

use std::fmt;

use crate::error::{Error, Result};
use crate::linmap::{check_linmap, LinMap, LinMapViolation};
use crate::scalar::Q;
use crate::space::Space;

use num::One;

/// `f: M -> L`, `g: L -> M`, `h: L -> L` between filtered complexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Context {
    delta: LinMap,
    d: LinMap,
    f: LinMap,
    g: LinMap,
    h: LinMap,
}

/// One failed axiom with its exact defect map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomDefect {
    pub axiom: &'static str,
    pub defect: LinMap,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextReport {
    /// Maps with the wrong degree or endpoints.
    pub shape: Vec<String>,
    /// Degree and filtration violations, labelled by the map.
    pub violations: Vec<(&'static str, LinMapViolation)>,
    pub defects: Vec<AxiomDefect>,
}

impl ContextReport {
    pub fn is_valid(&self) -> bool {
        self.shape.is_empty() && self.violations.is_empty() && self.defects.is_empty()
    }
}

impl fmt::Display for ContextReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.shape.clone();
        parts.extend(self.violations.iter().map(|(m, v)| format!("{m}: {v}")));
        parts.extend(self.defects.iter().map(|d| format!("{}: {:?}", d.axiom, d.defect)));
        write!(f, "{}", parts.join("; "))
    }
}

fn shape_errors(delta: &LinMap, d: &LinMap, f: &LinMap, g: &LinMap, h: &LinMap) -> Vec<String> {
    let l = delta.source();
    let m = d.source();
    let mut out = Vec::new();
    let mut want = |name: &str, map: &LinMap, src: &Space, tgt: &Space, deg: i32| {
        if map.source() != src || map.target() != tgt {
            out.push(format!("{name} must map {} -> {}", src.name(), tgt.name()));
        }
        if map.degree() != deg {
            out.push(format!("{name} must have degree {deg}, found {}", map.degree()));
        }
    };
    want("delta", delta, l, l, 1);
    want("d", d, m, m, 1);
    want("f", f, m, l, 0);
    want("g", g, l, m, 0);
    want("h", h, l, l, -1);
    out
}

/// Evaluates every context axiom exactly.
pub fn validate_context(delta: &LinMap, d: &LinMap, f: &LinMap, g: &LinMap, h: &LinMap) -> ContextReport {
    let shape = shape_errors(delta, d, f, g, h);
    if !shape.is_empty() {
        return ContextReport { shape, ..Default::default() };
    }
    let mut report = ContextReport::default();
    for (name, map) in [("delta", delta), ("d", d), ("f", f), ("g", g), ("h", h)] {
        report.violations.extend(check_linmap(map).into_iter().map(|v| (name, v)));
    }
    let c = |a: &LinMap, b: &LinMap| a.compose(b).expect("shapes checked");
    let sum = |a: LinMap, b: LinMap| a.try_add(&b).expect("shapes checked");
    let one_l = LinMap::identity(delta.source());
    let one_m = LinMap::identity(d.source());
    let homotopy = sum(sum(c(f, g), c(delta, h)), c(h, delta));
    let checks: Vec<(&'static str, LinMap)> = vec![
        ("gf = 1", c(g, f).try_sub(&one_m).expect("shapes checked")),
        ("fg + δh + hδ = 1", homotopy.try_sub(&one_l).expect("shapes checked")),
        ("h² = 0", c(h, h)),
        ("hf = 0", c(h, f)),
        ("gh = 0", c(g, h)),
        ("δ² = 0", c(delta, delta)),
        ("d² = 0", c(d, d)),
        ("δf = fd", c(delta, f).try_sub(&c(f, d)).expect("shapes checked")),
        ("gδ = dg", c(g, delta).try_sub(&c(d, g)).expect("shapes checked")),
    ];
    for (axiom, defect) in checks {
        if !defect.is_zero() {
            report.defects.push(AxiomDefect { axiom, defect });
        }
    }
    report
}

impl Context {
    pub fn new(delta: LinMap, d: LinMap, f: LinMap, g: LinMap, h: LinMap) -> Result<Context> {
        let report = validate_context(&delta, &d, &f, &g, &h);
        if !report.is_valid() {
            return Err(Error::InvalidContext(report.to_string()));
        }
        Ok(Context { delta, d, f, g, h })
    }

    /// Skips validation; for diagnostics on data that is known to be defective.
    pub fn unchecked(delta: LinMap, d: LinMap, f: LinMap, g: LinMap, h: LinMap) -> Context {
        Context { delta, d, f, g, h }
    }

    /// `M = L`, `f = g = 1`, `h = 0`.
    pub fn identity(delta: &LinMap) -> Context {
        let l = delta.source();
        Context {
            delta: delta.clone(),
            d: delta.clone(),
            f: LinMap::identity(l),
            g: LinMap::identity(l),
            h: LinMap::zero(l, l, -1),
        }
    }

    pub fn report(&self) -> ContextReport {
        validate_context(&self.delta, &self.d, &self.f, &self.g, &self.h)
    }

    pub fn big(&self) -> &Space {
        self.delta.source()
    }

    pub fn small(&self) -> &Space {
        self.d.source()
    }

    pub fn delta(&self) -> &LinMap {
        &self.delta
    }

    pub fn d(&self) -> &LinMap {
        &self.d
    }

    pub fn f(&self) -> &LinMap {
        &self.f
    }

    pub fn g(&self) -> &LinMap {
        &self.g
    }

    pub fn h(&self) -> &LinMap {
        &self.h
    }
}

/// Partial sums `Σ_{n=0}^{N} step^n`, requiring the `n = N` power to vanish.
fn geometric(step: &LinMap, bound: u32) -> Result<LinMap> {
    let mut power = LinMap::identity(step.source());
    let mut acc = power.clone();
    for _ in 0..bound {
        power = step.compose(&power)?;
        if power.is_zero() {
            return Ok(acc);
        }
        acc = acc.try_add(&power)?;
    }
    if power.is_zero() {
        Ok(acc)
    } else {
        Err(Error::Internal("perturbation series did not terminate".into()))
    }
}

/// The perturbed context for `δ + μ`:
/// `h_μ = Σ (−hμ)^n h`, `f_μ = Σ (−hμ)^n f`, `g_μ = Σ g(−μh)^n`, `d_μ = d + Σ g(−μh)^n μ f`.
pub fn perturb_context(ctx: &Context, mu: &LinMap) -> Result<Context> {
    let report = ctx.report();
    if !report.is_valid() {
        return Err(Error::InvalidContext(report.to_string()));
    }
    let l = ctx.big();
    if mu.source() != l || mu.target() != l {
        return Err(Error::SpaceMismatch { expected: l.name().to_string(), found: mu.source().name().to_string() });
    }
    if mu.degree() != 1 {
        return Err(Error::DegreeMismatch(format!("perturbation must have degree 1, found {}", mu.degree())));
    }
    if !check_linmap(mu).is_empty() || mu.weight_shift().is_some_and(|s| s < 1) {
        return Err(Error::NotPositiveFiltration);
    }
    let total = ctx.delta.try_add(mu)?;
    if !total.compose(&total)?.is_zero() {
        return Err(Error::NotSquareZero);
    }
    let minus = -Q::one();
    let hmu = ctx.h.compose(mu)?.scale(&minus);
    let muh = mu.compose(&ctx.h)?.scale(&minus);
    let bound = l.filtration_length();
    let left = geometric(&hmu, bound)?;
    let right = geometric(&muh, bound)?;
    let h_mu = left.compose(&ctx.h)?;
    let f_mu = left.compose(&ctx.f)?;
    let g_mu = ctx.g.compose(&right)?;
    let d_mu = ctx.d.try_add(&g_mu.compose(mu)?.compose(&ctx.f)?)?;
    Context::new(total, d_mu, f_mu, g_mu, h_mu)
        .map_err(|e| Error::Internal(format!("perturbed context fails validation: {e}")))
}
