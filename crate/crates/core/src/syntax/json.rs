//! Structural JSON interchange, schema version 1.

use serde::{Deserialize, Serialize};

use crate::expr::{EdgeTerm, Factor, Group, Item, Orientation, TensorExpr};
use crate::names::{BoxName, DirectedEdge, EdgeName};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Document {
    format: u32,
    factors: Vec<FactorDto>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum FactorDto {
    Empty,
    Identity {
        out: EdgeName,
        #[serde(rename = "in")]
        inp: EdgeName,
    },
    Generator {
        name: String,
        edgeterm: Vec<ItemDto>,
    },
    Box {
        name: BoxName,
        body: Vec<FactorDto>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ItemDto {
    Edge(DirectedEdge),
    Group {
        orientation: Orientation,
        #[serde(rename = "box")]
        boxname: BoxName,
        body: Vec<ItemDto>,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Serde(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
}

fn item_to(it: &Item) -> ItemDto {
    match it {
        Item::Edge(e) => ItemDto::Edge(e.clone()),
        Item::Group(g) => ItemDto::Group {
            orientation: g.orientation,
            boxname: g.boxname.clone(),
            body: g.body.items.iter().map(item_to).collect(),
        },
    }
}

fn item_from(it: ItemDto) -> Item {
    match it {
        ItemDto::Edge(e) => Item::Edge(e),
        ItemDto::Group {
            orientation,
            boxname,
            body,
        } => Item::Group(Group {
            orientation,
            boxname,
            body: EdgeTerm::new(body.into_iter().map(item_from).collect()),
        }),
    }
}

fn factor_to(f: &Factor) -> FactorDto {
    match f {
        Factor::Empty => FactorDto::Empty,
        Factor::Id { out, inp } => FactorDto::Identity {
            out: out.clone(),
            inp: inp.clone(),
        },
        Factor::Gen { name, eterm } => FactorDto::Generator {
            name: name.clone(),
            edgeterm: eterm.items.iter().map(item_to).collect(),
        },
        Factor::Box { name, body } => FactorDto::Box {
            name: name.clone(),
            body: body.factors.iter().map(factor_to).collect(),
        },
    }
}

fn factor_from(f: FactorDto) -> Factor {
    match f {
        FactorDto::Empty => Factor::Empty,
        FactorDto::Identity { out, inp } => Factor::Id { out, inp },
        FactorDto::Generator { name, edgeterm } => Factor::Gen {
            name,
            eterm: EdgeTerm::new(edgeterm.into_iter().map(item_from).collect()),
        },
        FactorDto::Box { name, body } => Factor::Box {
            name,
            body: TensorExpr::new(body.into_iter().map(factor_from).collect()),
        },
    }
}

pub fn export_json(g: &TensorExpr) -> String {
    let doc = Document {
        format: FORMAT_VERSION,
        factors: g.factors.iter().map(factor_to).collect(),
    };
    serde_json::to_string_pretty(&doc).expect("DTO serialization is infallible")
}

pub fn import_json(text: &str) -> Result<TensorExpr, JsonError> {
    let doc: Document = serde_json::from_str(text)?;
    if doc.format != FORMAT_VERSION {
        return Err(JsonError::Version(doc.format));
    }
    Ok(TensorExpr::new(
        doc.factors.into_iter().map(factor_from).collect(),
    ))
}
