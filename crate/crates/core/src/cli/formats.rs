//! Input files: `.ccjson` configurations, `.design.json` incidence
//! structures and `.bgr` bipartite edge lists.

use serde::Deserialize;
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::builders::{from_bipartite_graph, from_design_detailed, BipartiteGraph, DesignBuild, DesignMode, IncidenceStructure};
use crate::error::{Error, Result};
use crate::numerics::Matrix;
use crate::relations::{CoherentConfig, Relation, RelationId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Config,
    Design,
    Graph,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Config => "ccjson",
            Format::Design => "design",
            Format::Graph => "bgr",
        }
    }
}

/// What an input file described, after building its configuration.
#[derive(Clone, Debug)]
pub enum Source {
    Config(CoherentConfig),
    Design(Box<DesignBuild>),
    Graph(BipartiteGraph),
}

#[derive(Clone, Debug)]
pub struct Loaded {
    pub name: String,
    pub format: Format,
    /// Hex SHA-256 of the file bytes.
    pub digest: String,
    pub source: Source,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    fibres: Vec<usize>,
    relations: Vec<RelationFile>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    source: usize,
    target: usize,
    index: usize,
    matrix: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DesignFile {
    points: usize,
    blocks: Vec<Vec<usize>>,
    #[serde(default)]
    mode: Option<String>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
}

pub fn parse_config(text: &str) -> Result<CoherentConfig> {
    let file: ConfigFile = serde_json::from_str(text).map_err(json_error)?;
    let mut relations = Vec::with_capacity(file.relations.len());
    for r in file.relations {
        let matrix = Matrix::from_rows(&r.matrix)?;
        relations.push(Relation { id: RelationId::new(r.source, r.target, r.index), matrix });
    }
    CoherentConfig::new(file.fibres, relations)
}

pub fn parse_design(text: &str) -> Result<DesignBuild> {
    let file: DesignFile = serde_json::from_str(text).map_err(json_error)?;
    let mode = match file.mode.as_deref() {
        None => DesignMode::Auto,
        Some(m) => DesignMode::parse(m).ok_or_else(|| Error::Parse {
            line: 1,
            column: 1,
            message: format!("unknown design mode {m:?}"),
        })?,
    };
    let design = IncidenceStructure::new(file.points, file.blocks)?;
    from_design_detailed(&design, mode)
}

fn parse_pair(line: &str, number: usize) -> Result<(usize, usize)> {
    let mut fields = Vec::new();
    let mut rest = line;
    let mut offset = 0;
    while let Some(start) = rest.find(|c: char| !c.is_whitespace()) {
        let len = rest[start..].find(char::is_whitespace).unwrap_or(rest.len() - start);
        fields.push((offset + start + 1, &rest[start..start + len]));
        offset += start + len;
        rest = &rest[start + len..];
    }
    if fields.len() != 2 {
        let column = fields.get(2).map_or(line.len() + 1, |f| f.0);
        return Err(Error::Parse { line: number, column, message: format!("expected two integers, found {}", fields.len()) });
    }
    let value = |(column, text): (usize, &str)| {
        text.parse::<usize>().map_err(|_| Error::Parse {
            line: number,
            column,
            message: format!("{text:?} is not a non-negative integer"),
        })
    };
    Ok((value(fields[0])?, value(fields[1])?))
}

pub fn parse_bgr(text: &str) -> Result<BipartiteGraph> {
    let mut header = None;
    let mut edges = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        if line.trim().is_empty() {
            continue;
        }
        let pair = parse_pair(line, k + 1)?;
        match header {
            None => header = Some(pair),
            Some((p, q)) => {
                if pair.0 >= p || pair.1 >= q {
                    return Err(Error::Parse {
                        line: k + 1,
                        column: 1,
                        message: format!("edge {} {} is outside parts of sizes {p} and {q}", pair.0, pair.1),
                    });
                }
                edges.push(pair);
            }
        }
    }
    let (p, q) = header.ok_or_else(|| Error::Parse { line: 1, column: 1, message: "missing \"p q\" header".into() })?;
    let g = BipartiteGraph::new(p, q, edges)?;
    // Disconnected graphs are rejected here so that every loaded graph has a
    // distance partition.
    from_bipartite_graph(&g)?;
    Ok(g)
}

/// Chooses the format from the file name, or for a bare `.json` from the
/// keys of the top-level object.
pub fn detect_format(name: &str, text: &str) -> Result<Format> {
    if name.ends_with(".ccjson") {
        return Ok(Format::Config);
    }
    if name.ends_with(".design.json") {
        return Ok(Format::Design);
    }
    if name.ends_with(".bgr") {
        return Ok(Format::Graph);
    }
    if name.ends_with(".json") {
        let value: serde_json::Value = serde_json::from_str(text).map_err(json_error)?;
        if value.get("fibres").is_some() {
            return Ok(Format::Config);
        }
        if value.get("points").is_some() {
            return Ok(Format::Design);
        }
        return Err(Error::Parse { line: 1, column: 1, message: "JSON object has neither \"fibres\" nor \"points\"".into() });
    }
    Err(Error::Unsupported(format!("cannot tell the format of {name}; use .ccjson, .design.json or .bgr")))
}

pub fn load_str(name: &str, text: &str) -> Result<Loaded> {
    let format = detect_format(name, text)?;
    let source = match format {
        Format::Config => Source::Config(parse_config(text)?),
        Format::Design => Source::Design(Box::new(parse_design(text)?)),
        Format::Graph => Source::Graph(parse_bgr(text)?),
    };
    Ok(Loaded {
        name: name.to_string(),
        format,
        digest: format!("{:x}", Sha256::digest(text.as_bytes())),
        source,
    })
}

pub fn load(path: &Path) -> Result<Loaded> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let name = path.file_name().map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
    load_str(&name, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_lists() {
        let g = parse_bgr("# K2,3\n2 3\n0 0\n0 1\n0 2\n1 0\n1 1\n1 2\n").unwrap();
        assert_eq!(g.edges().len(), 6);
        match parse_bgr("2 3\n0 x\n") {
            Err(Error::Parse { line: 2, column: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_bgr("2 2\n0 0\n1 1\n"), Err(Error::Disconnected { .. })));
        assert!(matches!(parse_bgr("1 1\n0 1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn json_inputs() {
        let text = r#"{"fibres": [2], "relations": [
            {"source": 0, "target": 0, "index": 0, "matrix": [[1, 0], [0, 1]]},
            {"source": 0, "target": 0, "index": 1, "matrix": [[0, 1], [1, 0]]}]}"#;
        let loaded = load_str("k2.json", text).unwrap();
        assert_eq!(loaded.format, Format::Config);
        assert_eq!(loaded.digest.len(), 64);
        match load_str("bad.json", "{\"fibres\": [2,\n") {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        let design = r#"{"points": 4, "blocks": [[0,1],[0,2],[0,3],[1,2],[1,3],[2,3]], "mode": "quasi_symmetric"}"#;
        assert!(matches!(load_str("pairs.design.json", design).unwrap().source, Source::Design(_)));
        assert!(matches!(load_str("x.txt", ""), Err(Error::Unsupported(_))));
    }
}
