//! Ingestion of actor/generator incidence data and byte-deterministic
//! exports of graphs and traces.
//!
//! # Incidence CSV
//!
//! Headerless rows `actor,generator[,weight]`; the weight defaults to 1 and
//! must lie in `(0, 1]`. Repeated `(actor, generator)` rows keep the maximum
//! weight. Rows with weight 0 are rejected, all of them reported at once.
//!
//! # Incidence JSON
//!
//! An object keyed by actor. Each value is either an array of generators
//! (weight 1) or an object `generator → weight`:
//!
//! ```json
//! {"a1": ["g1", "g2"], "a2": {"g2": 0.5}, "a3": []}
//! ```

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::{self, DeserializeOwned, Deserializer, MapAccess, SeqAccess, Visitor};
use serde::{Deserialize, Serialize};

use crate::diffusion::SpreadTrace;
use crate::error::{Error, Result};
use crate::graph::{Edge, KnowledgeGraph};
use crate::ids::{ActorId, GeneratorId};
use crate::model::{KnowledgeBase, KnowledgeBaseBuilder};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum GraphFormat {
    #[default]
    EdgeJson,
    Dot,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum TraceFormat {
    #[default]
    Json,
    Csv,
}

/// One `actor, generator, weight` incidence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncidenceRecord {
    pub actor_id: ActorId,
    pub generator_id: GeneratorId,
    #[serde(default = "unit_weight")]
    pub weight: f64,
}

fn unit_weight() -> f64 {
    1.0
}

/// Reads a knowledge base from an incidence file.
pub fn ingest(path: impl AsRef<Path>, format: InputFormat) -> Result<KnowledgeBase> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    match format {
        InputFormat::Csv => parse_csv(&text, path),
        InputFormat::Json => parse_json(&text, path),
    }
}

/// Parses incidence CSV text; `origin` only labels diagnostics.
pub fn parse_csv(text: &str, origin: &Path) -> Result<KnowledgeBase> {
    let parse_error = |line: u64, message: String| Error::Parse {
        path: origin.to_owned(),
        line,
        message,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut builder = KnowledgeBaseBuilder::new();
    let mut zero_lines = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_error(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line());
        if !(2..=3).contains(&row.len()) {
            return Err(parse_error(line, format!("expected 2 or 3 fields, found {}", row.len())));
        }
        let actor = ActorId::new(&row[0]).map_err(|e| parse_error(line, e.to_string()))?;
        let generator = GeneratorId::new(&row[1]).map_err(|e| parse_error(line, e.to_string()))?;
        let weight = match row.get(2) {
            None => 1.0,
            Some(raw) => raw
                .trim()
                .parse::<f64>()
                .map_err(|_| parse_error(line, format!("invalid weight {raw:?}")))?,
        };
        if weight == 0.0 {
            zero_lines.push(line);
            continue;
        }
        builder
            .insert(actor, generator, weight)
            .map_err(|e| parse_error(line, e.to_string()))?;
    }
    if !zero_lines.is_empty() {
        return Err(Error::ZeroWeightRows {
            path: origin.to_owned(),
            lines: zero_lines,
        });
    }
    Ok(builder.build())
}

/// Parses incidence JSON text; `origin` only labels diagnostics.
pub fn parse_json(text: &str, origin: &Path) -> Result<KnowledgeBase> {
    if text.trim().is_empty() {
        return Ok(KnowledgeBase::default());
    }
    let JsonIncidences(builder) = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_owned(),
        line: e.line() as u64,
        message: e.to_string(),
    })?;
    Ok(builder.build())
}

struct JsonIncidences(KnowledgeBaseBuilder);

impl<'de> Deserialize<'de> for JsonIncidences {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct ActorsVisitor;

        impl<'de> Visitor<'de> for ActorsVisitor {
            type Value = JsonIncidences;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object mapping actor ids to generators")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<JsonIncidences, A::Error> {
                let mut builder = KnowledgeBaseBuilder::new();
                while let Some(actor) = map.next_key::<ActorId>()? {
                    let Generators(generators) = map.next_value()?;
                    builder.add_actor(actor.clone());
                    for (generator, weight) in generators {
                        builder
                            .insert(actor.clone(), generator, weight)
                            .map_err(de::Error::custom)?;
                    }
                }
                Ok(JsonIncidences(builder))
            }
        }

        deserializer.deserialize_map(ActorsVisitor)
    }
}

struct Generators(Vec<(GeneratorId, f64)>);

impl<'de> Deserialize<'de> for Generators {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct GeneratorsVisitor;

        impl<'de> Visitor<'de> for GeneratorsVisitor {
            type Value = Generators;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array of generator ids or an object of generator weights")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Generators, A::Error> {
                let mut out = Vec::new();
                while let Some(g) = seq.next_element::<GeneratorId>()? {
                    out.push((g, 1.0));
                }
                Ok(Generators(out))
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Generators, A::Error> {
                let mut out = Vec::new();
                while let Some((generator, weight)) = map.next_entry::<GeneratorId, f64>()? {
                    if !(weight > 0.0 && weight <= 1.0) {
                        return Err(de::Error::custom(format_args!(
                            "weight {weight} for generator {generator} is outside (0, 1]"
                        )));
                    }
                    out.push((generator, weight));
                }
                Ok(Generators(out))
            }
        }

        deserializer.deserialize_any(GeneratorsVisitor)
    }
}

/// The knowledge base as incidence CSV, readable by [`parse_csv`].
///
/// Actors without generators and universe members nobody holds have no
/// incidence row and are not represented.
pub fn export_kb_csv(kb: &KnowledgeBase) -> Vec<u8> {
    let mut out = Vec::new();
    for (actor, generator, weight) in kb.incidences() {
        writeln!(out, "{actor},{generator},{weight}").unwrap();
    }
    out
}

#[derive(Serialize)]
struct EdgeJson<'a> {
    vertices: &'a [ActorId],
    edges: &'a [Edge],
}

fn to_pretty_json<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("in-memory serialization cannot fail");
    out.push(b'\n');
    out
}

fn dot_quote(id: &ActorId) -> String {
    format!("\"{}\"", id.as_str().replace('\\', "\\\\").replace('"', "\\\""))
}

/// Serializes a graph. Vertices and edges come out sorted, so equal graphs
/// give equal bytes.
pub fn export_graph(g: &KnowledgeGraph, format: GraphFormat) -> Vec<u8> {
    match format {
        GraphFormat::EdgeJson => to_pretty_json(&EdgeJson {
            vertices: g.vertices(),
            edges: g.edges(),
        }),
        GraphFormat::Csv => {
            let mut out = b"source,target,weight\n".to_vec();
            for e in g.edges() {
                writeln!(out, "{},{},{}", e.source, e.target, e.weight).unwrap();
            }
            out
        }
        GraphFormat::Dot => {
            let mut out = b"graph knowledge {\n".to_vec();
            for v in g.vertices() {
                writeln!(out, "  {};", dot_quote(v)).unwrap();
            }
            for e in g.edges() {
                writeln!(
                    out,
                    "  {} -- {} [weight={w}, label=\"{w}\"];",
                    dot_quote(&e.source),
                    dot_quote(&e.target),
                    w = e.weight
                )
                .unwrap();
            }
            out.extend_from_slice(b"}\n");
            out
        }
    }
}

/// Serializes a spread trace; CSV rows are `round,actor_id` sorted by round
/// then actor.
pub fn export_trace(t: &SpreadTrace, format: TraceFormat) -> Vec<u8> {
    match format {
        TraceFormat::Json => to_pretty_json(t),
        TraceFormat::Csv => {
            let mut out = b"round,actor_id\n".to_vec();
            for (round, actors) in t.rounds.iter().enumerate() {
                for actor in actors {
                    writeln!(out, "{round},{actor}").unwrap();
                }
            }
            out
        }
    }
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub(crate) fn json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    to_pretty_json(value)
}

/// Writes `value` as pretty JSON followed by a newline.
pub fn save_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    write_bytes(path.as_ref(), &to_pretty_json(value))
}

/// Reads a JSON artifact written by [`save_json`] (knowledge base, graph,
/// trace).
pub fn load_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let path: PathBuf = path.as_ref().to_owned();
    let text = fs::read_to_string(&path).map_err(|source| Error::Io {
        path: path.clone(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path, source })
}
