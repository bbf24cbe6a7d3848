//! Self-describing text persistence for ensembles.
//!
//! Layout (line oriented):
//!
//! ```text
//! shapsel-model v1
//! base_score <float>
//! features <count>
//! <one feature name per line>
//! trees <count>
//! tree <node count>
//! i <feature> <threshold> <cover>      # internal node, preorder
//! l <weight> <cover>                   # leaf
//! ```
//!
//! Floats are decimal scientific literals with 17 significant digits, which
//! round-trip `f64` bit-exactly.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gbdt::tree::{Ensemble, TreeNode};

const MAGIC: &str = "shapsel-model v1";

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_node(node: &TreeNode, out: &mut String) {
    match node {
        TreeNode::Internal {
            feature,
            threshold,
            cover,
            left,
            right,
        } => {
            out.push_str(&format!(
                "i {feature} {} {}\n",
                fmt_f64(*threshold),
                fmt_f64(*cover)
            ));
            write_node(left, out);
            write_node(right, out);
        }
        TreeNode::Leaf { weight, cover } => {
            out.push_str(&format!("l {} {}\n", fmt_f64(*weight), fmt_f64(*cover)));
        }
    }
}

fn count_nodes(node: &TreeNode) -> usize {
    match node {
        TreeNode::Leaf { .. } => 1,
        TreeNode::Internal { left, right, .. } => 1 + count_nodes(left) + count_nodes(right),
    }
}

/// Serialize an ensemble to the model text format.
pub fn model_to_string(ens: &Ensemble) -> String {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!("base_score {}\n", fmt_f64(ens.base_score)));
    out.push_str(&format!("features {}\n", ens.encoded_names.len()));
    for name in &ens.encoded_names {
        out.push_str(name);
        out.push('\n');
    }
    out.push_str(&format!("trees {}\n", ens.trees.len()));
    for tree in &ens.trees {
        out.push_str(&format!("tree {}\n", count_nodes(tree)));
        write_node(tree, &mut out);
    }
    out
}

struct NodeLines<'a> {
    lines: std::iter::Peekable<std::str::Lines<'a>>,
    consumed: usize,
}

impl<'a> NodeLines<'a> {
    fn next_line(&mut self) -> Result<&'a str> {
        self.consumed += 1;
        self.lines
            .next()
            .ok_or_else(|| Error::ModelFormat("unexpected end of file".into()))
    }
}

fn parse_f64(tok: &str) -> Result<f64> {
    tok.parse()
        .map_err(|_| Error::ModelFormat(format!("bad float literal '{tok}'")))
}

fn read_node(r: &mut NodeLines) -> Result<TreeNode> {
    let line = r.next_line()?;
    let mut toks = line.split_whitespace();
    match toks.next() {
        Some("i") => {
            let feature: usize = toks
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::ModelFormat(format!("bad internal node '{line}'")))?;
            let threshold = parse_f64(
                toks.next()
                    .ok_or_else(|| Error::ModelFormat(format!("bad internal node '{line}'")))?,
            )?;
            let cover = parse_f64(
                toks.next()
                    .ok_or_else(|| Error::ModelFormat(format!("bad internal node '{line}'")))?,
            )?;
            let left = Box::new(read_node(r)?);
            let right = Box::new(read_node(r)?);
            Ok(TreeNode::Internal {
                feature,
                threshold,
                cover,
                left,
                right,
            })
        }
        Some("l") => {
            let weight = parse_f64(
                toks.next()
                    .ok_or_else(|| Error::ModelFormat(format!("bad leaf '{line}'")))?,
            )?;
            let cover = parse_f64(
                toks.next()
                    .ok_or_else(|| Error::ModelFormat(format!("bad leaf '{line}'")))?,
            )?;
            Ok(TreeNode::Leaf { weight, cover })
        }
        _ => Err(Error::ModelFormat(format!("unexpected node line '{line}'"))),
    }
}

/// Parse a model from its text format.
pub fn model_from_str(text: &str) -> Result<Ensemble> {
    let mut lines = text.lines();
    let magic = lines
        .next()
        .ok_or_else(|| Error::ModelFormat("empty model file".into()))?;
    if magic.trim_end() != MAGIC {
        return Err(Error::ModelFormat(format!(
            "bad header '{magic}', expected '{MAGIC}'"
        )));
    }
    let base_line = lines
        .next()
        .ok_or_else(|| Error::ModelFormat("missing base_score".into()))?;
    let base_score = match base_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["base_score", v] => parse_f64(v)?,
        _ => return Err(Error::ModelFormat(format!("bad base_score line '{base_line}'"))),
    };
    let feat_line = lines
        .next()
        .ok_or_else(|| Error::ModelFormat("missing features count".into()))?;
    let n_features: usize = match feat_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["features", v] => v
            .parse()
            .map_err(|_| Error::ModelFormat(format!("bad features count '{v}'")))?,
        _ => return Err(Error::ModelFormat(format!("bad features line '{feat_line}'"))),
    };
    let mut encoded_names = Vec::with_capacity(n_features);
    for _ in 0..n_features {
        encoded_names.push(
            lines
                .next()
                .ok_or_else(|| Error::ModelFormat("missing feature name".into()))?
                .to_string(),
        );
    }
    let trees_line = lines
        .next()
        .ok_or_else(|| Error::ModelFormat("missing trees count".into()))?;
    let n_trees: usize = match trees_line.split_whitespace().collect::<Vec<_>>()[..] {
        ["trees", v] => v
            .parse()
            .map_err(|_| Error::ModelFormat(format!("bad trees count '{v}'")))?,
        _ => return Err(Error::ModelFormat(format!("bad trees line '{trees_line}'"))),
    };

    let mut reader = NodeLines {
        lines: lines.peekable(),
        consumed: 0,
    };
    let mut trees = Vec::with_capacity(n_trees);
    for t in 0..n_trees {
        let header = reader.next_line()?;
        let declared: usize = match header.split_whitespace().collect::<Vec<_>>()[..] {
            ["tree", v] => v
                .parse()
                .map_err(|_| Error::ModelFormat(format!("bad tree header '{header}'")))?,
            _ => return Err(Error::ModelFormat(format!("bad tree header '{header}'"))),
        };
        let before = reader.consumed;
        let tree = read_node(&mut reader)?;
        let read = reader.consumed - before;
        if read != declared {
            return Err(Error::ModelFormat(format!(
                "tree {t} declares {declared} nodes but {read} were read"
            )));
        }
        trees.push(tree);
    }
    if reader.lines.any(|l| !l.trim().is_empty()) {
        return Err(Error::ModelFormat("trailing content after last tree".into()));
    }

    Ok(Ensemble {
        base_score,
        trees,
        encoded_names,
    })
}

pub fn save_model(ens: &Ensemble, path: &Path) -> Result<()> {
    std::fs::write(path, model_to_string(ens)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Ensemble> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    model_from_str(&text)
}
