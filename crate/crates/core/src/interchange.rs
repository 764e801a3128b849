//! Versioned JSON documents. Rationals are `"p/q"` strings, basis elements are referenced by
//! name and operator inputs are name lists in basis order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::linmap::LinMap;
use crate::scalar::{format_q, parse_q};
use crate::space::{BasisElement, Space, Vector};
use crate::structure::CurvedStructure;
use crate::symop::{InhomOp, SymOp};

pub const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Space,
    Linmap,
    Symop,
    Structure,
    Context,
    Element,
    Report,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDoc {
    pub name: String,
    pub degree: i32,
    pub weight: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub name: String,
    pub filtration: u32,
    pub basis: Vec<BasisDoc>,
}

/// Coefficients by basis name.
pub type Coefficients = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementDoc {
    pub space: String,
    pub value: Coefficients,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinMapDoc {
    pub source: String,
    pub target: String,
    pub degree: i32,
    pub images: BTreeMap<String, Coefficients>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryDoc {
    pub inputs: Vec<String>,
    pub value: Coefficients,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OpDoc {
    pub source: String,
    pub target: String,
    pub degree: i32,
    pub entries: Vec<EntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureDoc {
    pub delta: LinMapDoc,
    pub lambda: OpDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextDoc {
    pub delta: LinMapDoc,
    pub d: LinMapDoc,
    pub f: LinMapDoc,
    pub g: LinMapDoc,
    pub h: LinMapDoc,
}

/// One exact defect: a named vector, map or operator, or a message.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DefectDoc {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<ElementDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linmap: Option<LinMapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symop: Option<OpDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedOpDoc {
    pub name: String,
    pub value: OpDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferDoc {
    pub big_f: OpDoc,
    pub mu: OpDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub iterations: Vec<usize>,
    pub residuals: Vec<NamedOpDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleDoc {
    pub side: String,
    pub input: ElementDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image: Option<ElementDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub round_trip: Option<ElementDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDoc {
    pub command: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub defects: Vec<DefectDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transfer: Option<TransferDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub samples: Vec<SampleDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spaces: Vec<SpaceDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub linmap: Option<LinMapDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symop: Option<OpDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structure: Option<StructureDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<ContextDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<ElementDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<ReportDoc>,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

impl Document {
    pub fn empty(kind: Kind) -> Document {
        Document {
            version: VERSION,
            kind,
            spaces: Vec::new(),
            linmap: None,
            symop: None,
            structure: None,
            context: None,
            element: None,
            report: None,
        }
    }

    pub fn parse(text: &str) -> Result<Document> {
        let doc: Document = serde_json::from_str(text).map_err(parse_err)?;
        if doc.version != VERSION {
            return Err(Error::Parse(format!("unsupported version {}", doc.version)));
        }
        Ok(doc)
    }

    /// Pretty-printed canonical text with a trailing newline.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    fn add_space(&mut self, space: &Space) {
        if !self.spaces.iter().any(|s| s.name == space.name()) {
            self.spaces.push(space_doc(space));
        }
    }

    pub fn from_space(space: &Space) -> Document {
        let mut doc = Document::empty(Kind::Space);
        doc.add_space(space);
        doc
    }

    pub fn from_linmap(m: &LinMap) -> Document {
        let mut doc = Document::empty(Kind::Linmap);
        doc.add_space(m.source());
        doc.add_space(m.target());
        doc.linmap = Some(linmap_doc(m));
        doc
    }

    pub fn from_op(op: &InhomOp) -> Document {
        let mut doc = Document::empty(Kind::Symop);
        doc.add_space(op.source());
        doc.add_space(op.target());
        doc.symop = Some(op_doc(op));
        doc
    }

    pub fn from_structure(s: &CurvedStructure) -> Document {
        let mut doc = Document::empty(Kind::Structure);
        doc.add_space(s.space());
        doc.structure = Some(structure_doc(s.delta(), s.lambda()));
        doc
    }

    pub fn from_context(ctx: &Context) -> Document {
        let mut doc = Document::empty(Kind::Context);
        doc.add_space(ctx.big());
        doc.add_space(ctx.small());
        doc.context = Some(context_doc(ctx));
        doc
    }

    /// An element together with the structure whose Maurer–Cartan equation it should solve.
    pub fn from_element(x: &Vector, s: &CurvedStructure) -> Document {
        let mut doc = Document::from_structure(s);
        doc.kind = Kind::Element;
        doc.element = Some(element_doc(x));
        doc
    }

    pub fn report(report: ReportDoc) -> Document {
        let mut doc = Document::empty(Kind::Report);
        doc.report = Some(report);
        doc
    }

    /// The spaces declared by the document, by name.
    pub fn space_table(&self) -> Result<Spaces> {
        let mut table = BTreeMap::new();
        for s in &self.spaces {
            let basis = s
                .basis
                .iter()
                .map(|b| BasisElement { name: b.name.clone(), degree: b.degree, weight: b.weight })
                .collect();
            let space = Space::from_basis(s.name.clone(), basis, s.filtration).map_err(parse_err)?;
            if table.insert(s.name.clone(), space).is_some() {
                return Err(Error::Parse(format!("space `{}` declared twice", s.name)));
            }
        }
        Ok(Spaces(table))
    }

    pub fn require<'a, T>(&'a self, field: &'a Option<T>, name: &str) -> Result<&'a T> {
        field.as_ref().ok_or_else(|| Error::Parse(format!("{:?} document lacks `{name}`", self.kind)))
    }

    pub fn structure_data(&self) -> Result<(LinMap, InhomOp)> {
        let spaces = self.space_table()?;
        let s = self.require(&self.structure, "structure")?;
        Ok((spaces.linmap(&s.delta)?, spaces.op(&s.lambda)?))
    }

    /// The five context maps, not yet validated.
    pub fn context_data(&self) -> Result<Context> {
        let spaces = self.space_table()?;
        let c = self.require(&self.context, "context")?;
        Ok(Context::unchecked(
            spaces.linmap(&c.delta)?,
            spaces.linmap(&c.d)?,
            spaces.linmap(&c.f)?,
            spaces.linmap(&c.g)?,
            spaces.linmap(&c.h)?,
        ))
    }
}

/// Spaces by name, used to resolve references while loading.
#[derive(Debug, Clone)]
pub struct Spaces(BTreeMap<String, Space>);

impl Spaces {
    pub fn get(&self, name: &str) -> Result<&Space> {
        self.0.get(name).ok_or_else(|| Error::Parse(format!("unknown space `{name}`")))
    }

    pub fn vector(&self, space: &Space, c: &Coefficients) -> Result<Vector> {
        let terms = c
            .iter()
            .map(|(n, q)| Ok((space.index_of(n).map_err(parse_err)?, parse_q(q)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut v = Vector::zero(space);
        for (i, q) in terms {
            v = v.try_add(&Vector::unit(space, i).scale(&q))?;
        }
        Ok(v)
    }

    pub fn element(&self, e: &ElementDoc) -> Result<Vector> {
        self.vector(self.get(&e.space)?, &e.value)
    }

    pub fn linmap(&self, m: &LinMapDoc) -> Result<LinMap> {
        let (src, tgt) = (self.get(&m.source)?, self.get(&m.target)?);
        let images = m
            .images
            .iter()
            .map(|(n, c)| Ok((n.as_str(), self.vector(tgt, c)?)))
            .collect::<Result<Vec<_>>>()?;
        LinMap::from_images(src, tgt, m.degree, &images).map_err(parse_err)
    }

    /// Loads an operator; entries are validated for degree, filtration and symmetry.
    pub fn op(&self, o: &OpDoc) -> Result<InhomOp> {
        let (src, tgt) = (self.get(&o.source)?, self.get(&o.target)?);
        let mut op = InhomOp::zero(src, tgt, o.degree);
        let top = op.max_arity();
        let mut parts: Vec<SymOp> = (0..=top).map(|n| SymOp::zero(src, tgt, n, o.degree)).collect();
        for e in &o.entries {
            let n = e.inputs.len();
            if n > top {
                return Err(Error::NotFiltered(format!("entry of arity {n} exceeds the filtration length")));
            }
            let idx = e.inputs.iter().map(|x| src.index_of(x).map_err(parse_err)).collect::<Result<Vec<_>>>()?;
            let v = self.vector(tgt, &e.value)?;
            parts[n].add_entry(&idx, v.sparse())?;
        }
        for (n, p) in parts.into_iter().enumerate() {
            op.set_component(n, p);
        }
        Ok(op)
    }
}

pub fn space_doc(s: &Space) -> SpaceDoc {
    SpaceDoc {
        name: s.name().to_string(),
        filtration: s.filtration_length(),
        basis: s.basis().iter().map(|b| BasisDoc { name: b.name.clone(), degree: b.degree, weight: b.weight }).collect(),
    }
}

pub fn coefficients(v: &Vector) -> Coefficients {
    v.terms().map(|(n, c)| (n.to_string(), format_q(c))).collect()
}

pub fn element_doc(v: &Vector) -> ElementDoc {
    ElementDoc { space: v.space().name().to_string(), value: coefficients(v) }
}

pub fn linmap_doc(m: &LinMap) -> LinMapDoc {
    LinMapDoc {
        source: m.source().name().to_string(),
        target: m.target().name().to_string(),
        degree: m.degree(),
        images: m.nonzero_columns().into_iter().map(|(n, v)| (n, coefficients(&v))).collect(),
    }
}

pub fn op_doc(op: &InhomOp) -> OpDoc {
    let src = op.source();
    let mut entries = Vec::new();
    for comp in op.components() {
        for (key, v) in comp.entries() {
            entries.push(EntryDoc {
                inputs: key.iter().map(|&i| src.basis_name(i).to_string()).collect(),
                value: coefficients(&Vector::from_sparse(op.target(), v.clone())),
            });
        }
    }
    OpDoc { source: src.name().to_string(), target: op.target().name().to_string(), degree: op.degree(), entries }
}

pub fn structure_doc(delta: &LinMap, lambda: &InhomOp) -> StructureDoc {
    StructureDoc { delta: linmap_doc(delta), lambda: op_doc(lambda) }
}

pub fn context_doc(ctx: &Context) -> ContextDoc {
    ContextDoc {
        delta: linmap_doc(ctx.delta()),
        d: linmap_doc(ctx.d()),
        f: linmap_doc(ctx.f()),
        g: linmap_doc(ctx.g()),
        h: linmap_doc(ctx.h()),
    }
}
