//! The transferred structure `μ = g(λ∙F)` with `F = f − h(λ∙F)`, its residual
//! checks, and the bijection between the Kuranishi set and `MC(M, μ)`.

use num::One;

use crate::calculus::{bullet, bullet_component, circle, circle_b, mc_apply};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::linmap::LinMap;
use crate::scalar::Q;
use crate::space::Vector;
use crate::structure::{mc_residual, morphism_residual, structure_residual, CurvedStructure};
use crate::symop::{embed_linmap, InhomOp, SDegree};

fn check_inputs(ctx: &Context, s: &CurvedStructure) -> Result<()> {
    let report = ctx.report();
    if !report.is_valid() {
        return Err(Error::InvalidContext(report.to_string()));
    }
    if s.delta() != ctx.delta() {
        return Err(Error::InvalidContext("structure differential differs from the context differential".into()));
    }
    let sr = s.report()?;
    if !sr.is_valid() {
        return Err(Error::StructureInvalid(format!("{:?}", sr.residual)));
    }
    s.require_pronilpotent()
}

/// `Φ(F) = f − h(λ∙F)`.
pub fn fixed_point_map(ctx: &Context, lambda: &InhomOp, big_f: &InhomOp) -> Result<InhomOp> {
    let f = embed_linmap(ctx.f())?;
    let correction = bullet(lambda, big_f)?.post_compose(ctx.h())?;
    f.try_sub(&correction)
}

/// Solves `F = f − h(λ∙F)` one arity at a time, iterating each component until it is unchanged.
///
/// Returns `F` and the number of applications of `Φ` used per arity, the last one being the
/// application that confirmed stability.
pub fn solve_f(ctx: &Context, s: &CurvedStructure) -> Result<(InhomOp, Vec<usize>)> {
    check_inputs(ctx, s)?;
    let bound = ctx.big().filtration_length() as usize;
    let f = embed_linmap(ctx.f())?;
    let mut big_f = f.clone();
    let mut iterations = Vec::with_capacity(big_f.max_arity() + 1);
    let minus = -Q::one();
    for n in 0..=big_f.max_arity() {
        let mut used = 0;
        loop {
            used += 1;
            if used > bound {
                return Err(Error::NoStabilization { arity: n, bound });
            }
            let lf = bullet_component(s.lambda(), &big_f, n)?;
            let mut next = f.component(n).cloned().expect("arity in range");
            for (k, v) in lf.entries() {
                next.accumulate(k.to_vec(), &ctx.h().apply_sparse(v), &minus);
            }
            if &next == big_f.component(n).expect("arity in range") {
                break;
            }
            big_f.set_component(n, next);
        }
        iterations.push(used);
    }
    Ok((big_f, iterations))
}

/// Iterates `Φ` on the whole operator. Returns `F` and the filtration degree of the defect
/// `F_k − Φ(F_k)` at every step; the sequence must increase strictly until it reaches infinity.
pub fn solve_f_global(ctx: &Context, s: &CurvedStructure) -> Result<(InhomOp, Vec<SDegree>)> {
    check_inputs(ctx, s)?;
    let bound = ctx.big().filtration_length() as usize + 1;
    let mut big_f = embed_linmap(ctx.f())?;
    let mut degrees = Vec::new();
    for _ in 0..=bound {
        let next = fixed_point_map(ctx, s.lambda(), &big_f)?;
        let defect = big_f.try_sub(&next)?;
        let deg = defect.s_filtration_degree();
        if let Some(&prev) = degrees.last() {
            if deg <= prev && deg != SDegree::Infinite {
                return Err(Error::Internal(format!("defect filtration degree did not increase: {prev} then {deg}")));
            }
        }
        degrees.push(deg);
        if defect.is_zero() {
            return Ok((big_f, degrees));
        }
        big_f = next;
    }
    Err(Error::NoStabilization { arity: big_f.max_arity(), bound })
}

/// `μ = g(λ∙F)`.
pub fn transferred_structure(ctx: &Context, lambda: &InhomOp, big_f: &InhomOp) -> Result<InhomOp> {
    bullet(lambda, big_f)?.post_compose(ctx.g())
}

/// Exact residuals of a candidate transfer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferResiduals {
    /// `F − f + h(λ∙F)`.
    pub fixed_point: InhomOp,
    /// `δ∙F − F∘d + λ∙F − F∘μ` with the differentials embedded as arity-1 operators.
    pub alpha: InhomOp,
    /// The morphism residual `δF + λ∙F − F∘μ` via the hom differential.
    pub morphism: InhomOp,
    /// `dμ + μ∘μ`.
    pub beta: InhomOp,
    /// `gF − 1_M`.
    pub g_f: InhomOp,
    /// `α + h(λ∘_F α)`.
    pub alpha_identity: InhomOp,
    /// `β + g(λ∘_F α)`.
    pub beta_identity: InhomOp,
}

impl TransferResiduals {
    pub fn named(&self) -> [(&'static str, &InhomOp); 7] {
        [
            ("fixed_point", &self.fixed_point),
            ("alpha", &self.alpha),
            ("morphism", &self.morphism),
            ("beta", &self.beta),
            ("g_f", &self.g_f),
            ("alpha_identity", &self.alpha_identity),
            ("beta_identity", &self.beta_identity),
        ]
    }

    pub fn all_zero(&self) -> bool {
        self.named().iter().all(|(_, r)| r.is_zero())
    }

    pub fn nonzero(&self) -> Vec<&'static str> {
        self.named().iter().filter(|(_, r)| !r.is_zero()).map(|(n, _)| *n).collect()
    }
}

/// Diagnostic residuals for any `(F, μ)`, not necessarily an exact solution.
pub fn transfer_residuals(ctx: &Context, s: &CurvedStructure, big_f: &InhomOp, mu: &InhomOp) -> Result<TransferResiduals> {
    let lambda = s.lambda();
    let fixed_point = big_f.try_sub(&fixed_point_map(ctx, lambda, big_f)?)?;
    let delta = embed_linmap(ctx.delta())?;
    let d = embed_linmap(ctx.d())?;
    let lf = bullet(lambda, big_f)?;
    let alpha = bullet(&delta, big_f)?
        .try_sub(&circle(big_f, &d)?)?
        .try_add(&lf)?
        .try_sub(&circle(big_f, mu)?)?;
    let small = CurvedStructure::unchecked(ctx.d().clone(), mu.clone());
    let morphism = morphism_residual(big_f, &small, s)?;
    let beta = structure_residual(ctx.d(), mu)?;
    let g_f = big_f.post_compose(ctx.g())?.try_sub(&InhomOp::identity(ctx.small()))?;
    let lfa = circle_b(lambda, big_f, &alpha)?;
    let alpha_identity = alpha.try_add(&lfa.post_compose(ctx.h())?)?;
    let beta_identity = beta.try_add(&lfa.post_compose(ctx.g())?)?;
    Ok(TransferResiduals { fixed_point, alpha, morphism, beta, g_f, alpha_identity, beta_identity })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferResult {
    pub context: Context,
    pub structure: CurvedStructure,
    pub big_f: InhomOp,
    pub mu: InhomOp,
    pub iterations: Vec<usize>,
    pub residuals: TransferResiduals,
}

impl TransferResult {
    /// `(M, d, μ)`.
    pub fn small_structure(&self) -> CurvedStructure {
        CurvedStructure::unchecked(self.context.d().clone(), self.mu.clone())
    }

    pub fn is_exact(&self) -> bool {
        self.residuals.all_zero()
    }
}

/// Solves for `F`, builds `μ` and evaluates every residual.
pub fn transfer(ctx: &Context, s: &CurvedStructure) -> Result<TransferResult> {
    let (big_f, iterations) = solve_f(ctx, s)?;
    let mu = transferred_structure(ctx, s.lambda(), &big_f)?;
    let residuals = transfer_residuals(ctx, s, &big_f, &mu)?;
    Ok(TransferResult { context: ctx.clone(), structure: s.clone(), big_f, mu, iterations, residuals })
}

/// Rebuilds a result from a stored `(F, μ)` and recomputes the residuals.
pub fn replay(ctx: &Context, s: &CurvedStructure, big_f: InhomOp, mu: InhomOp) -> Result<TransferResult> {
    let residuals = transfer_residuals(ctx, s, &big_f, &mu)?;
    Ok(TransferResult { context: ctx.clone(), structure: s.clone(), big_f, mu, iterations: Vec::new(), residuals })
}

/// `y = F_*(x)`; requires `x ∈ MC(M, μ)` and checks `y ∈ MC(L, λ)` with `h(y) = 0`.
pub fn kuranishi_forward(tr: &TransferResult, x: &Vector) -> Result<Vector> {
    let r = mc_residual(x, &tr.small_structure())?;
    if !r.is_zero() {
        return Err(Error::NotMC(r.to_string()));
    }
    let y = mc_apply(&tr.big_f, x)?;
    let ry = mc_residual(&y, &tr.structure)?;
    if !ry.is_zero() {
        return Err(Error::Internal(format!("forward image is not MC: residual {ry}")));
    }
    let hy = tr.context.h().apply(&y)?;
    if !hy.is_zero() {
        return Err(Error::Internal(format!("forward image leaves the Kuranishi set: h(y) = {hy}")));
    }
    Ok(y)
}

/// `x = g(y)` for `y` in the Kuranishi set; checks `x ∈ MC(M, μ)` and
/// `y − F(gy) = hλ(F(gy)) − hλ(y)`.
pub fn kuranishi_backward(tr: &TransferResult, y: &Vector) -> Result<Vector> {
    let r = mc_residual(y, &tr.structure)?;
    if !r.is_zero() {
        return Err(Error::NotMC(r.to_string()));
    }
    let hy = tr.context.h().apply(y)?;
    if !hy.is_zero() {
        return Err(Error::NotInKuranishiSet(hy.to_string()));
    }
    let x = tr.context.g().apply(y)?;
    let rx = mc_residual(&x, &tr.small_structure())?;
    if !rx.is_zero() {
        return Err(Error::Internal(format!("backward image is not MC: residual {rx}")));
    }
    let fgy = mc_apply(&tr.big_f, &x)?;
    let h = tr.context.h();
    let lhs = y.try_sub(&fgy)?;
    let rhs = h.apply(&mc_apply(tr.structure.lambda(), &fgy)?)?.try_sub(&h.apply(&mc_apply(tr.structure.lambda(), y)?)?)?;
    if lhs != rhs {
        return Err(Error::Internal(format!("contraction identity fails: {lhs} vs {rhs}")));
    }
    Ok(x)
}

/// Point-level solve of `y = f(x) − h(λ∙y)`, independent of the operator `F`.
pub fn kuranishi_point(ctx: &Context, s: &CurvedStructure, x: &Vector) -> Result<Vector> {
    let fx = ctx.f().apply(x)?;
    let mut y = fx.clone();
    for _ in 0..=ctx.big().filtration_length() {
        let next = fx.try_sub(&ctx.h().apply(&mc_apply(s.lambda(), &y)?)?)?;
        if next == y {
            return Ok(y);
        }
        y = next;
    }
    Err(Error::NoStabilization { arity: 0, bound: ctx.big().filtration_length() as usize + 1 })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleOutcome {
    pub input: Vector,
    pub image: Option<Vector>,
    pub round_trip: Option<Vector>,
    pub error: Option<String>,
}

impl SampleOutcome {
    pub fn exact(&self) -> bool {
        self.error.is_none() && self.round_trip.as_ref() == Some(&self.input)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BijectionReport {
    /// Samples from `MC(M)`: forward, then backward.
    pub small: Vec<SampleOutcome>,
    /// Samples from the Kuranishi set: backward, then forward.
    pub big: Vec<SampleOutcome>,
}

impl BijectionReport {
    pub fn all_exact(&self) -> bool {
        self.small.iter().chain(&self.big).all(SampleOutcome::exact)
    }
}

fn round_trip(
    input: &Vector,
    there: impl Fn(&Vector) -> Result<Vector>,
    back: impl Fn(&Vector) -> Result<Vector>,
) -> SampleOutcome {
    let mut out = SampleOutcome { input: input.clone(), image: None, round_trip: None, error: None };
    match there(input) {
        Err(e) => out.error = Some(e.to_string()),
        Ok(y) => {
            out.image = Some(y.clone());
            match back(&y) {
                Err(e) => out.error = Some(e.to_string()),
                Ok(x) => {
                    if &x != input {
                        out.error = Some(format!("round trip returned {x}"));
                    }
                    out.round_trip = Some(x);
                }
            }
        }
    }
    out
}

/// Round trips every sample through the bijection.
pub fn verify_bijection(tr: &TransferResult, small: &[Vector], big: &[Vector]) -> BijectionReport {
    BijectionReport {
        small: small
            .iter()
            .map(|x| round_trip(x, |x| kuranishi_forward(tr, x), |y| kuranishi_backward(tr, y)))
            .collect(),
        big: big
            .iter()
            .map(|y| round_trip(y, |y| kuranishi_backward(tr, y), |x| kuranishi_forward(tr, x)))
            .collect(),
    }
}

/// The arity-1 component as a linear map.
pub fn linear_part(op: &InhomOp) -> LinMap {
    let columns = (0..op.source().dim())
        .map(|i| op.component(1).map(|c| c.eval_basis(&[i])).unwrap_or_default())
        .collect();
    LinMap::from_columns(op.source(), op.target(), op.degree(), columns)
}
