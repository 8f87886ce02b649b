//! JSON input format for graphs of groups and tame presentations.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::gog::{EdgeSpec, GogError, GogSpec, GraphOfGroups, PeripheralSpec, VertexSpec};
use crate::group::{GroupDesc, GroupError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("parse error at line {line}, column {column}: {message}")]
    ParseError { line: usize, column: usize, message: String },
    #[error("invalid group for `{owner}`: {source}")]
    Group { owner: String, source: GroupError },
    #[error(transparent)]
    Gog(#[from] GogError),
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum FileGroup {
    Free {
        symbols: Vec<String>,
    },
    Abelian {
        symbols: Vec<String>,
        rank: Option<usize>,
        #[serde(default)]
        torsion: Vec<u64>,
    },
    Finite {
        symbols: Vec<String>,
        table: Vec<Vec<u32>>,
        generators: Option<Vec<String>>,
    },
    Trivial {},
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FilePeripheral {
    id: String,
    #[serde(default)]
    generators: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileVertex {
    id: String,
    group: FileGroup,
    #[serde(default)]
    peripherals: Vec<FilePeripheral>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileEdge {
    id: String,
    group: FileGroup,
    from: String,
    to: String,
    #[serde(default)]
    from_map: BTreeMap<String, String>,
    #[serde(default)]
    to_map: BTreeMap<String, String>,
    from_container: String,
    to_container: String,
    stable_letter: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSelected {
    vertex: String,
    #[serde(default = "one")]
    coset: String,
    #[serde(default)]
    generators: Vec<String>,
}

fn one() -> String {
    "1".into()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileTame {
    id: String,
    vertices: Vec<FileSelected>,
    #[serde(default)]
    connecting: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRoot {
    vertices: Vec<FileVertex>,
    #[serde(default)]
    edges: Vec<FileEdge>,
    #[serde(default)]
    spanning_tree: Vec<String>,
    #[serde(default)]
    tame_presentations: Vec<FileTame>,
}

/// A selected tree vertex `coset · G_vertex` with generators of `H_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectedSpec {
    pub vertex: String,
    pub coset: String,
    pub generators: Vec<String>,
}

/// Unresolved tame presentation: words are kept as text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TameSpec {
    pub id: String,
    pub vertices: Vec<SelectedSpec>,
    pub connecting: Vec<String>,
}

pub struct Input {
    pub graph: GraphOfGroups,
    pub tame: Vec<TameSpec>,
}

fn to_group(g: FileGroup, owner: &str) -> Result<GroupDesc, InputError> {
    let err = |source| InputError::Group { owner: owner.to_string(), source };
    match g {
        FileGroup::Free { symbols } => {
            let s: Vec<&str> = symbols.iter().map(String::as_str).collect();
            Ok(GroupDesc::free(&s))
        }
        FileGroup::Abelian { symbols, rank, torsion } => {
            let s: Vec<&str> = symbols.iter().map(String::as_str).collect();
            let rank = rank.unwrap_or(symbols.len().saturating_sub(torsion.len()));
            GroupDesc::abelian(&s, rank, &torsion).map_err(err)
        }
        FileGroup::Finite { symbols, table, generators } => {
            let s: Vec<&str> = symbols.iter().map(String::as_str).collect();
            let gens = match generators {
                Some(names) => Some(
                    names
                        .iter()
                        .map(|n| {
                            symbols
                                .iter()
                                .position(|x| x == n)
                                .map(|i| i as u32)
                                .ok_or_else(|| err(GroupError::UnknownSymbol(n.clone())))
                        })
                        .collect::<Result<Vec<_>, _>>()?,
                ),
                None => None,
            };
            GroupDesc::finite(&s, table, gens).map_err(err)
        }
        FileGroup::Trivial {} => Ok(GroupDesc::trivial()),
    }
}

/// Parses and validates an input document.
pub fn parse_input(text: &str) -> Result<Input, InputError> {
    let root: FileRoot = serde_json::from_str(text).map_err(|e| InputError::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let mut vertices = Vec::new();
    for v in root.vertices {
        vertices.push(VertexSpec {
            group: to_group(v.group, &v.id)?,
            id: v.id,
            peripherals: v
                .peripherals
                .into_iter()
                .map(|p| PeripheralSpec { id: p.id, generators: p.generators })
                .collect(),
        });
    }
    let mut edges = Vec::new();
    for e in root.edges {
        edges.push(EdgeSpec {
            group: to_group(e.group, &e.id)?,
            id: e.id,
            from: e.from,
            to: e.to,
            from_map: e.from_map,
            to_map: e.to_map,
            from_container: e.from_container,
            to_container: e.to_container,
            stable_letter: e.stable_letter,
        });
    }
    let graph = GraphOfGroups::new(&GogSpec { vertices, edges, spanning_tree: root.spanning_tree })?;
    let tame = root
        .tame_presentations
        .into_iter()
        .map(|t| TameSpec {
            id: t.id,
            vertices: t
                .vertices
                .into_iter()
                .map(|s| SelectedSpec { vertex: s.vertex, coset: s.coset, generators: s.generators })
                .collect(),
            connecting: t.connecting,
        })
        .collect();
    Ok(Input { graph, tame })
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"{
      "vertices": [{"id": "v", "group": {"kind": "free", "symbols": ["a", "b"]},
                    "peripherals": [{"id": "W", "generators": ["ab"]}]}],
      "edges": [{"id": "e", "group": {"kind": "free", "symbols": ["c"]}, "from": "v", "to": "v",
                 "from_map": {"c": "(ab)^2"}, "to_map": {"c": "(ab)^3"},
                 "from_container": "W", "to_container": "W", "stable_letter": "t"}],
      "spanning_tree": [],
      "tame_presentations": [{"id": "Q", "vertices": [{"vertex": "v", "generators": ["ab"]}], "connecting": ["t"]}]
    }"#;

    #[test]
    fn parses_example() {
        let inp = parse_input(EXAMPLE).unwrap();
        assert_eq!(inp.graph.symbols, vec!["a", "b", "t"]);
        assert_eq!(inp.tame[0].vertices[0].coset, "1");
    }

    #[test]
    fn reports_position() {
        let err = parse_input("{\n  \"vertices\": [,]\n}").err().unwrap();
        match err {
            InputError::ParseError { line, column, .. } => assert_eq!((line, column), (2, 16)),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn abelian_and_finite_groups() {
        let doc = r#"{
          "vertices": [
            {"id": "A", "group": {"kind": "abelian", "symbols": ["x", "y"]}, "peripherals": [{"id": "P", "generators": ["x", "y"]}]},
            {"id": "B", "group": {"kind": "finite", "symbols": ["e", "s"], "table": [[0, 1], [1, 0]]}, "peripherals": [{"id": "T"}]}
          ],
          "edges": [{"id": "f", "group": {"kind": "trivial"}, "from": "A", "to": "B",
                     "from_container": "P", "to_container": "T"}],
          "spanning_tree": ["f"]
        }"#;
        let inp = parse_input(doc).unwrap();
        assert!(inp.graph.edges[0].in_tree);
    }

    #[test]
    fn unknown_vertex_is_reported() {
        let doc = EXAMPLE.replace("\"to\": \"v\"", "\"to\": \"w\"");
        assert!(matches!(parse_input(&doc), Err(InputError::Gog(GogError::UnknownVertex(_)))));
    }
}
