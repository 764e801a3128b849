//! Command-line entry points. Exit codes: 0 success, 1 mathematical defect, 2 input error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::context::{perturb_context, Context};
use crate::error::{Error, Result};
use crate::fixtures::dgla::{core_from_dgla, default_degrees, matrix_dgla, tensor_nilpotent};
use crate::fixtures::generate::{kuranishi_fixture, random_context, random_pair, random_perturbation, ContextRecipe};
use crate::fixtures::hodge::hodge_context;
use crate::fixtures::named;
use crate::fixtures::random::{random_q, rng};
use crate::fixtures::samples::{kuranishi_samples, mc_samples};
use crate::interchange::{
    element_doc, linmap_doc, op_doc, DefectDoc, Document, Kind, NamedOpDoc, ReportDoc, SampleDoc, TransferDoc,
};
use crate::linmap::{check_linmap, LinMap};
use crate::structure::{check_structure, mc_residual, CurvedStructure};
use crate::symop::InhomOp;
use crate::transfer::{replay, transfer, verify_bijection, SampleOutcome, TransferResult};

#[derive(Debug, Parser)]
#[command(name = "linfty", version, about = "Exact curved L-infinity transfer and Maurer-Cartan verification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Checks a document of any kind and reports every defect exactly.
    Validate { path: PathBuf },
    /// Transfers a structure along a context and writes F, μ and the residuals.
    Transfer {
        context: PathBuf,
        structure: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Round-trips certified Maurer-Cartan samples through the Kuranishi bijection.
    Bijection {
        context: PathBuf,
        structure: PathBuf,
        #[arg(long, default_value_t = 4)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Replay F and μ from a stored transfer result instead of solving.
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Applies the perturbation lemma to a context and a linear perturbation.
    Perturb {
        context: PathBuf,
        linmap: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Emits a generated or named fixture.
    Gen {
        recipe: Recipe,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        part: Option<Part>,
        /// Matrix size for `dgla-nilpotent`.
        #[arg(long, default_value_t = 4)]
        size: usize,
        /// Filtration length for `dgla-nilpotent`.
        #[arg(long, default_value_t = 4)]
        truncation: u32,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Runs the property suite and prints a deterministic transcript.
    Selftest {
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Recipe {
    FixA,
    FixAPrime,
    FixB,
    FixC,
    RandomContext,
    RandomPair,
    Kuranishi,
    DglaNilpotent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Part {
    Context,
    Structure,
    Perturbation,
}

fn read(path: &Path) -> Result<Document> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    Document::parse(&text)
}

fn write(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::Parse(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn expect_kind(doc: &Document, kind: Kind) -> Result<()> {
    if doc.kind != kind {
        return Err(Error::Parse(format!("expected a {kind:?} document, found {:?}", doc.kind)));
    }
    Ok(())
}

fn report(command: &str) -> ReportDoc {
    ReportDoc { command: command.into(), ok: true, error: None, defects: Vec::new(), transfer: None, samples: Vec::new() }
}

fn message(name: &str, text: String) -> DefectDoc {
    DefectDoc { name: name.into(), message: Some(text), element: None, linmap: None, symop: None }
}

fn map_defect(name: &str, m: &LinMap) -> DefectDoc {
    DefectDoc { name: name.into(), message: None, element: None, linmap: Some(linmap_doc(m)), symop: None }
}

/// One defect per nonzero arity of an operator residual.
fn op_defects(name: &str, op: &InhomOp) -> Vec<DefectDoc> {
    op.components()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(n, c)| {
            let mut single = InhomOp::zero(op.source(), op.target(), op.degree());
            single.set_component(n, c.clone());
            DefectDoc {
                name: format!("{name} arity {n}"),
                message: None,
                element: None,
                linmap: None,
                symop: Some(op_doc(&single)),
            }
        })
        .collect()
}

fn load_structure(doc: &Document) -> Result<CurvedStructure> {
    let (delta, lambda) = doc.structure_data()?;
    CurvedStructure::new(delta, lambda)
}

fn load_context(doc: &Document) -> Result<Context> {
    let c = doc.context_data()?;
    let r = c.report();
    if !r.is_valid() {
        return Err(Error::InvalidContext(r.to_string()));
    }
    Ok(c)
}

fn validate(doc: &Document) -> Result<ReportDoc> {
    let mut rep = report("validate");
    match doc.kind {
        Kind::Space => {
            doc.space_table()?;
        }
        Kind::Linmap => {
            let m = doc.space_table()?.linmap(doc.require(&doc.linmap, "linmap")?)?;
            for v in check_linmap(&m) {
                rep.defects.push(message(&format!("{:?} at {}", v.kind, v.basis), v.to_string()));
            }
        }
        Kind::Symop => {
            doc.space_table()?.op(doc.require(&doc.symop, "symop")?)?;
        }
        Kind::Structure => {
            let (delta, lambda) = doc.structure_data()?;
            let r = check_structure(&delta, &lambda)?;
            rep.defects.extend(op_defects("structure residual", &r.residual));
            if let Some(d2) = r.delta_squared.filter(|d| !d.is_zero()) {
                rep.defects.push(map_defect("delta squared", &d2));
            }
            for v in r.delta_violations {
                rep.defects.push(message("delta", v.to_string()));
            }
        }
        Kind::Context => {
            let r = doc.context_data()?.report();
            rep.defects.extend(r.shape.into_iter().map(|s| message("shape", s)));
            for (m, v) in r.violations {
                rep.defects.push(message(m, v.to_string()));
            }
            for d in r.defects {
                rep.defects.push(map_defect(d.axiom, &d.defect));
            }
        }
        Kind::Element => {
            let (delta, lambda) = doc.structure_data()?;
            let s = CurvedStructure::unchecked(delta, lambda);
            let x = doc.space_table()?.element(doc.require(&doc.element, "element")?)?;
            let r = mc_residual(&x, &s)?;
            if !r.is_zero() {
                rep.defects.push(DefectDoc {
                    name: "Maurer-Cartan residual".into(),
                    message: None,
                    element: Some(element_doc(&r)),
                    linmap: None,
                    symop: None,
                });
            }
        }
        Kind::Report => {
            let tr = load_result(doc)?;
            for (name, r) in tr.residuals.named() {
                rep.defects.extend(op_defects(name, r));
            }
        }
    }
    rep.ok = rep.defects.is_empty();
    Ok(rep)
}

/// Rebuilds a stored transfer result from a `report` document that carries its inputs.
fn load_result(doc: &Document) -> Result<TransferResult> {
    let ctx = load_context(doc)?;
    let s = load_structure(doc)?;
    let t = doc.require(&doc.report, "report")?.transfer.as_ref().ok_or_else(|| Error::Parse("report has no transfer".into()))?;
    let spaces = doc.space_table()?;
    replay(&ctx, &s, spaces.op(&t.big_f)?, spaces.op(&t.mu)?)
}

fn transfer_doc(tr: &TransferResult) -> TransferDoc {
    TransferDoc {
        big_f: op_doc(&tr.big_f),
        mu: op_doc(&tr.mu),
        iterations: tr.iterations.clone(),
        residuals: tr.residuals.named().iter().map(|(n, r)| NamedOpDoc { name: n.to_string(), value: op_doc(r) }).collect(),
    }
}

fn result_document(tr: &TransferResult, rep: ReportDoc) -> Document {
    let mut doc = Document::from_context(&tr.context);
    let s = Document::from_structure(&tr.structure);
    for sp in s.spaces {
        if !doc.spaces.contains(&sp) {
            doc.spaces.push(sp);
        }
    }
    doc.kind = Kind::Report;
    doc.structure = s.structure;
    doc.report = Some(rep);
    doc
}

fn load_pair(context: &Path, structure: &Path) -> Result<(Context, CurvedStructure)> {
    let c = read(context)?;
    expect_kind(&c, Kind::Context)?;
    let s = read(structure)?;
    expect_kind(&s, Kind::Structure)?;
    let ctx = load_context(&c)?;
    let (delta, lambda) = s.structure_data()?;
    if delta.source() != ctx.big() {
        return Err(Error::SpaceMismatch { expected: ctx.big().name().into(), found: delta.source().name().into() });
    }
    Ok((ctx, CurvedStructure::new(delta, lambda)?))
}

fn sample_doc(side: &str, s: &SampleOutcome) -> SampleDoc {
    SampleDoc {
        side: side.into(),
        input: element_doc(&s.input),
        image: s.image.as_ref().map(element_doc),
        round_trip: s.round_trip.as_ref().map(element_doc),
        error: s.error.clone(),
    }
}

fn generate(recipe: Recipe, seed: u64, part: Option<Part>, size: usize, truncation: u32) -> Result<Document> {
    let mut r = rng(seed);
    let want = |default: Part, allowed: &[Part]| -> Result<Part> {
        let p = part.unwrap_or(default);
        if allowed.contains(&p) {
            Ok(p)
        } else {
            Err(Error::Parse(format!("recipe {recipe:?} has no {p:?} part")))
        }
    };
    let pair = |ctx: &Context, s: &CurvedStructure, p: Part| match p {
        Part::Context => Document::from_context(ctx),
        _ => Document::from_structure(s),
    };
    let both = [Part::Context, Part::Structure];
    Ok(match recipe {
        Recipe::FixA => pair(&named::fix_a_self_context(), &named::fix_a(), want(Part::Structure, &both)?),
        Recipe::FixAPrime => {
            want(Part::Structure, &[Part::Structure])?;
            let (delta, lambda) = named::fix_a_prime();
            Document::from_structure(&CurvedStructure::unchecked(delta, lambda))
        }
        Recipe::FixB => pair(&named::fix_b_context(), &named::fix_b_structure(), want(Part::Structure, &both)?),
        Recipe::FixC => match want(Part::Perturbation, &[Part::Context, Part::Perturbation])? {
            Part::Context => Document::from_context(&named::fix_b_context()),
            _ => Document::from_linmap(&named::fix_c_perturbation()),
        },
        Recipe::RandomContext => {
            let p = want(Part::Context, &[Part::Context, Part::Perturbation])?;
            let recipe = ContextRecipe::random(&mut r);
            let ctx = random_context(&mut r, &recipe);
            let mu = random_perturbation(&mut r, &ctx)?;
            match p {
                Part::Context => Document::from_context(&ctx),
                _ => Document::from_linmap(&mu),
            }
        }
        Recipe::RandomPair => {
            let p = want(Part::Structure, &both)?;
            let recipe = ContextRecipe::random(&mut r);
            let (ctx, s) = random_pair(&mut r, &recipe)?;
            pair(&ctx, &s, p)
        }
        Recipe::Kuranishi => {
            let p = want(Part::Structure, &both)?;
            let k = kuranishi_fixture(&mut r)?;
            pair(&k.context, &k.structure, p)
        }
        Recipe::DglaNilpotent => {
            let p = want(Part::Structure, &both)?;
            if size < 2 || truncation < 2 {
                return Err(Error::Parse("size and truncation must be at least 2".into()));
            }
            let degrees = default_degrees(size);
            let mut q = Vec::new();
            let mut i = 0;
            while i + 1 < size {
                if degrees[i] - degrees[i + 1] == 1 {
                    q.push((i, random_q(&mut r)));
                    i += 2;
                } else {
                    i += 1;
                }
            }
            let g = matrix_dgla(&degrees, size, &q)?;
            let s = tensor_nilpotent(&core_from_dgla(&g, "c")?, "L", truncation, 1)?;
            let ctx = hodge_context(s.delta())?;
            pair(&ctx, &s, p)
        }
    })
}

fn outcome(result: Result<(Document, bool)>, out: Option<&Path>) -> i32 {
    match result {
        Ok((doc, ok)) => match write(out, &doc.to_text()) {
            Ok(()) => i32::from(!ok),
            Err(e) => fail(e),
        },
        Err(e) => fail(e),
    }
}

fn fail(e: Error) -> i32 {
    eprintln!("error[{}]: {e}", e.code());
    if e.is_input_error() {
        2
    } else {
        let mut rep = report("error");
        rep.ok = false;
        rep.error = Some(format!("{}: {e}", e.code()));
        print!("{}", Document::report(rep).to_text());
        1
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Validate { path } => outcome(
            read(&path).and_then(|doc| {
                let rep = validate(&doc)?;
                let ok = rep.ok;
                Ok((Document::report(rep), ok))
            }),
            None,
        ),
        Command::Transfer { context, structure, out } => outcome(
            load_pair(&context, &structure).and_then(|(ctx, s)| {
                let tr = transfer(&ctx, &s)?;
                let mut rep = report("transfer");
                rep.ok = tr.is_exact();
                rep.defects = tr.residuals.nonzero().into_iter().map(|n| message(n, "nonzero residual".into())).collect();
                rep.transfer = Some(transfer_doc(&tr));
                Ok((result_document(&tr, rep), tr.is_exact()))
            }),
            out.as_deref(),
        ),
        Command::Bijection { context, structure, samples, seed, result } => outcome(
            load_pair(&context, &structure).and_then(|(ctx, s)| {
                let tr = match result {
                    Some(p) => {
                        let doc = read(&p)?;
                        expect_kind(&doc, Kind::Report)?;
                        let stored = load_result(&doc)?;
                        if stored.context != ctx || stored.structure != s {
                            return Err(Error::Parse("stored result belongs to different inputs".into()));
                        }
                        stored
                    }
                    None => transfer(&ctx, &s)?,
                };
                let mut rep = report("bijection");
                for name in tr.residuals.nonzero() {
                    rep.defects.extend(op_defects(name, tr.residuals.named().iter().find(|(n, _)| *n == name).expect("listed").1));
                }
                let mut r = rng(seed);
                let small = mc_samples(&mut r, &tr.small_structure(), samples)?;
                let big = kuranishi_samples(&mut r, &tr, &small, samples)?;
                let b = verify_bijection(&tr, &small, &big);
                rep.samples = b.small.iter().map(|s| sample_doc("small", s)).chain(b.big.iter().map(|s| sample_doc("big", s))).collect();
                rep.ok = rep.defects.is_empty() && b.all_exact() && !small.is_empty();
                if small.is_empty() {
                    rep.error = Some("no certified samples".into());
                }
                let ok = rep.ok;
                Ok((result_document(&tr, rep), ok))
            }),
            None,
        ),
        Command::Perturb { context, linmap, out } => outcome(
            (|| {
                let c = read(&context)?;
                expect_kind(&c, Kind::Context)?;
                let ctx = load_context(&c)?;
                let m = read(&linmap)?;
                expect_kind(&m, Kind::Linmap)?;
                let mu = m.space_table()?.linmap(m.require(&m.linmap, "linmap")?)?;
                if mu.source() != ctx.big() || mu.target() != ctx.big() {
                    return Err(Error::SpaceMismatch { expected: ctx.big().name().into(), found: mu.source().name().into() });
                }
                Ok((Document::from_context(&perturb_context(&ctx, &mu)?), true))
            })(),
            out.as_deref(),
        ),
        Command::Gen { recipe, seed, part, size, truncation, out } => {
            outcome(generate(recipe, seed, part, size, truncation).map(|d| (d, true)), out.as_deref())
        }
        Command::Selftest { iters, seed } => {
            let (transcript, ok) = crate::selftest::run(seed, iters);
            print!("{transcript}");
            i32::from(!ok)
        }
    }
}
