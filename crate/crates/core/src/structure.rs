//! Curved L∞ structures, L∞ morphisms and Maurer-Cartan elements.

use std::collections::BTreeMap;

use num::One;

use crate::calculus::{bullet, circle, mc_apply};
use crate::error::{Error, Result};
use crate::linmap::{check_linmap, LinMap, LinMapViolation};
use crate::scalar::{sign, Q};
use crate::space::{sparse_add_scaled, sparse_scale, Space, Sparse, Vector};
use crate::symop::{
    embed_linmap, for_each_multiset, hom_differential, sort_with_sign, InhomOp, SDegree, SymOp,
};

/// `(L, δ, λ)` with `δ` of degree 1 and `λ ∈ S^1(L, L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurvedStructure {
    delta: LinMap,
    lambda: InhomOp,
}

#[derive(Debug, Clone)]
pub struct StructureReport {
    /// `δλ + λ∘λ`.
    pub residual: InhomOp,
    /// `δ²`, checked separately only for flat structures.
    pub delta_squared: Option<LinMap>,
    pub delta_violations: Vec<LinMapViolation>,
    pub is_flat: bool,
    pub is_pronilpotent: bool,
}

impl StructureReport {
    pub fn is_valid(&self) -> bool {
        self.residual.is_zero()
            && self.delta_squared.as_ref().map_or(true, LinMap::is_zero)
            && self.delta_violations.is_empty()
    }

    fn describe(&self) -> String {
        if !self.delta_violations.is_empty() {
            return self.delta_violations[0].to_string();
        }
        if let Some(d2) = self.delta_squared.as_ref().filter(|d| !d.is_zero()) {
            return format!("δ² = {d2:?}");
        }
        format!("{:?}", self.residual)
    }
}

pub fn structure_residual(delta: &LinMap, lambda: &InhomOp) -> Result<InhomOp> {
    if lambda.degree() != 1 && !lambda.is_zero() {
        return Err(Error::DegreeMismatch(format!("brackets must have degree 1, found {}", lambda.degree())));
    }
    let d = hom_differential(lambda, delta, delta)?;
    d.try_add(&circle(lambda, lambda)?)
}

/// Evaluates the structure equation and the side checks on `δ`.
pub fn check_structure(delta: &LinMap, lambda: &InhomOp) -> Result<StructureReport> {
    if delta.degree() != 1 {
        return Err(Error::DegreeMismatch(format!("differential must have degree 1, found {}", delta.degree())));
    }
    delta.source().ensure_same(lambda.source())?;
    let residual = structure_residual(delta, lambda)?;
    let is_flat = lambda.constant_term().is_zero();
    let delta_squared = is_flat.then(|| delta.compose(delta)).transpose()?;
    Ok(StructureReport {
        residual,
        delta_squared,
        delta_violations: check_linmap(delta),
        is_flat,
        is_pronilpotent: is_pronilpotent(lambda),
    })
}

pub fn is_pronilpotent(lambda: &InhomOp) -> bool {
    lambda.s_filtration_degree() >= SDegree::Finite(1)
}

impl CurvedStructure {
    /// Validates the structure equation.
    pub fn new(delta: LinMap, lambda: InhomOp) -> Result<CurvedStructure> {
        let report = check_structure(&delta, &lambda)?;
        if !report.is_valid() {
            return Err(Error::StructureInvalid(report.describe()));
        }
        Ok(CurvedStructure { delta, lambda })
    }

    /// Skips validation; for diagnostics on data that is known to be defective.
    pub fn unchecked(delta: LinMap, lambda: InhomOp) -> CurvedStructure {
        CurvedStructure { delta, lambda }
    }

    /// The zero structure on a space.
    pub fn trivial(space: &Space) -> CurvedStructure {
        CurvedStructure { delta: LinMap::zero(space, space, 1), lambda: InhomOp::zero(space, space, 1) }
    }

    pub fn space(&self) -> &Space {
        self.delta.source()
    }

    pub fn delta(&self) -> &LinMap {
        &self.delta
    }

    pub fn lambda(&self) -> &InhomOp {
        &self.lambda
    }

    pub fn curvature(&self) -> Vector {
        self.lambda.constant_term()
    }

    pub fn is_flat(&self) -> bool {
        self.curvature().is_zero()
    }

    pub fn is_pronilpotent(&self) -> bool {
        is_pronilpotent(&self.lambda)
    }

    pub fn require_pronilpotent(&self) -> Result<()> {
        if self.is_pronilpotent() {
            Ok(())
        } else {
            Err(Error::NotPronilpotent(self.lambda.s_filtration_degree().to_string()))
        }
    }

    pub fn report(&self) -> Result<StructureReport> {
        check_structure(&self.delta, &self.lambda)
    }

    /// `embed(δ) + λ`, the total operator whose self-composition is the structure residual.
    pub fn total(&self) -> Result<InhomOp> {
        embed_linmap(&self.delta)?.try_add(&self.lambda)
    }
}

/// Unshifted brackets of one arity on `G`, given on ordered tuples of basis indices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Brackets {
    pub arity: usize,
    pub values: BTreeMap<Vec<usize>, Sparse>,
}

fn permutations_of(t: &[usize]) -> Vec<Vec<usize>> {
    fn rec(k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == cur.len() {
            out.push(cur.clone());
            return;
        }
        for i in k..cur.len() {
            cur.swap(k, i);
            rec(k + 1, cur, out);
            cur.swap(k, i);
        }
    }
    let mut out = Vec::new();
    rec(0, &mut t.to_vec(), &mut out);
    out
}

/// `λ_n(x_1, .., x_n) = (-1)^{Σ (n-i)|x_i|} [x_1, .., x_n]_n` on `L = G[1]`.
///
/// `l` must be `g` with every degree lowered by one. Every ordering of every
/// input multiset is checked, so non-antisymmetric input is reported.
pub fn shift_brackets(g: &Space, l: &Space, brackets: &[Brackets]) -> Result<InhomOp> {
    if g.dim() != l.dim() || (0..g.dim()).any(|i| l.degree(i) != g.degree(i) - 1 || l.weight(i) != g.weight(i)) {
        return Err(Error::DegreeMismatch("target space is not the shift of the bracket space".into()));
    }
    let mut lambda = InhomOp::zero(l, l, 1);
    for br in brackets {
        let n = br.arity;
        for key in br.values.keys() {
            if key.len() != n {
                return Err(Error::ArityMismatch { expected: n, found: key.len() });
            }
        }
        if n > lambda.max_arity() {
            if br.values.values().any(|v| !v.is_empty()) {
                return Err(Error::NotFiltered(format!("bracket of arity {n} exceeds the filtration length")));
            }
            continue;
        }
        let mut comp = SymOp::zero(l, l, n, 1);
        for (key, value) in shift_table(g, l, br)? {
            comp.add_entry(&key, &value)?;
        }
        lambda.set_component(n, comp);
    }
    Ok(lambda)
}

/// Shifted values on sorted multisets, with every ordering checked against graded antisymmetry.
/// No filtration check is made.
pub(crate) fn shift_table(g: &Space, l: &Space, br: &Brackets) -> Result<BTreeMap<Vec<usize>, Sparse>> {
    let n = br.arity;
    let shifted_value = |t: &[usize]| -> Sparse {
        let e: i64 = t.iter().enumerate().map(|(i, &x)| (n - 1 - i) as i64 * l.degree(x) as i64).sum();
        br.values.get(t).map(|v| sparse_scale(v, &sign(e))).unwrap_or_default()
    };
    let mut out = BTreeMap::new();
    let mut keys = Vec::new();
    for_each_multiset(l, n, u32::MAX, |t| keys.push(t.to_vec()));
    for key in keys {
        let base = shifted_value(&key);
        for t in permutations_of(&key) {
            let mut sorted = t.clone();
            let odd = sort_with_sign(&mut sorted, l);
            let expected = if odd { sparse_scale(&base, &-Q::one()) } else { base.clone() };
            if shifted_value(&t) != expected {
                let names: Vec<&str> = t.iter().map(|&i| g.basis_name(i)).collect();
                return Err(Error::SymmetryViolation(format!("bracket at ({})", names.join(", "))));
            }
        }
        if !base.is_empty() {
            out.insert(key, base);
        }
    }
    Ok(out)
}

/// A differential graded Lie algebra: differential and binary bracket on `G`.
#[derive(Debug, Clone)]
pub struct Dgla {
    pub space: Space,
    pub differential: LinMap,
    pub bracket: Brackets,
}

/// The L∞ structure of a DGLA on `L = G[1]`: `δ` unchanged, `λ_2 = (-1)^{|x_1|}[x_1, x_2]`.
pub fn from_dgla(dgla: &Dgla, name: &str) -> Result<CurvedStructure> {
    if dgla.bracket.arity != 2 {
        return Err(Error::NotDgla(format!("bracket has arity {}", dgla.bracket.arity)));
    }
    let l = dgla.space.shifted(name);
    let lambda = shift_brackets(&dgla.space, &l, std::slice::from_ref(&dgla.bracket))?;
    let delta = LinMap::from_columns(
        &l,
        &l,
        1,
        (0..l.dim()).map(|i| dgla.differential.column(i).clone()).collect(),
    );
    CurvedStructure::new(delta, lambda)
}

/// `δφ + μ∙φ − φ∘λ` for `φ ∈ S^0(L, M)`.
pub fn morphism_residual(phi: &InhomOp, source: &CurvedStructure, target: &CurvedStructure) -> Result<InhomOp> {
    if phi.degree() != 0 && !phi.is_zero() {
        return Err(Error::DegreeMismatch(format!("morphisms have degree 0, found {}", phi.degree())));
    }
    source.space().ensure_same(phi.source())?;
    target.space().ensure_same(phi.target())?;
    let d = hom_differential(phi, source.delta(), target.delta())?;
    let mu_phi = bullet(target.lambda(), phi)?;
    let phi_lambda = circle(phi, source.lambda())?;
    d.try_add(&mu_phi)?.try_sub(&phi_lambda)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    source: CurvedStructure,
    target: CurvedStructure,
    phi: InhomOp,
}

impl Morphism {
    pub fn new(source: CurvedStructure, target: CurvedStructure, phi: InhomOp) -> Result<Morphism> {
        let r = morphism_residual(&phi, &source, &target)?;
        if !r.is_zero() {
            return Err(Error::NotAMorphism(format!("{r:?}")));
        }
        Ok(Morphism { source, target, phi })
    }

    pub fn identity(s: &CurvedStructure) -> Morphism {
        Morphism { source: s.clone(), target: s.clone(), phi: InhomOp::identity(s.space()) }
    }

    pub fn source(&self) -> &CurvedStructure {
        &self.source
    }

    pub fn target(&self) -> &CurvedStructure {
        &self.target
    }

    pub fn phi(&self) -> &InhomOp {
        &self.phi
    }
}

/// `ψ∙φ`; the result is re-checked against the morphism equation.
pub fn compose_morphisms(psi: &Morphism, phi: &Morphism) -> Result<Morphism> {
    if psi.source != phi.target {
        return Err(Error::SpaceMismatch {
            expected: psi.source.space().name().to_string(),
            found: phi.target.space().name().to_string(),
        });
    }
    let composed = bullet(&psi.phi, &phi.phi)?;
    let r = morphism_residual(&composed, &phi.source, &psi.target)?;
    if !r.is_zero() {
        return Err(Error::Internal(format!("composite fails the morphism equation: {r:?}")));
    }
    Ok(Morphism { source: phi.source.clone(), target: psi.target.clone(), phi: composed })
}

/// `δx + Σ (1/n!) λ_n(x, .., x)`.
pub fn mc_residual(x: &Vector, s: &CurvedStructure) -> Result<Vector> {
    let lx = mc_apply(s.lambda(), x)?;
    let dx = s.delta().apply(x)?;
    let mut acc = dx.into_sparse();
    sparse_add_scaled(&mut acc, lx.sparse(), &Q::one());
    Ok(Vector::from_sparse(s.space(), acc))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McElement {
    structure: CurvedStructure,
    x: Vector,
}

impl McElement {
    pub fn new(structure: &CurvedStructure, x: Vector) -> Result<McElement> {
        let r = mc_residual(&x, structure)?;
        if !r.is_zero() {
            return Err(Error::NotMC(r.to_string()));
        }
        Ok(McElement { structure: structure.clone(), x })
    }

    pub fn structure(&self) -> &CurvedStructure {
        &self.structure
    }

    pub fn value(&self) -> &Vector {
        &self.x
    }
}

/// `φ_* x = Σ (1/n!) φ_n(x, .., x)`, re-checked against the target MC equation.
pub fn mc_pushforward(phi: &Morphism, x: &McElement) -> Result<McElement> {
    if &x.structure != phi.source() {
        return Err(Error::SpaceMismatch {
            expected: phi.source().space().name().to_string(),
            found: x.structure.space().name().to_string(),
        });
    }
    let y = mc_apply(phi.phi(), &x.x)?;
    let r = mc_residual(&y, phi.target())?;
    if !r.is_zero() {
        return Err(Error::Internal(format!("pushforward left the MC set: residual {r}")));
    }
    Ok(McElement { structure: phi.target().clone(), x: y })
}
