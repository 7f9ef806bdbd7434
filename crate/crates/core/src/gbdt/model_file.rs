//! Binary model file. The byte layout is documented in `docs/model-format.md`;
//! all integers and floats are little-endian.

use std::io::{Cursor, Read};
use std::path::Path;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use sha2::{Digest, Sha256};

use super::{Model, Node, TrainConfig, Tree, TreeEnsemble};
use crate::error::{Error, Result};
use crate::features::{Category, FeatureSchema};
use crate::preprocess::StandardizationStats;

pub const MAGIC: &[u8; 4] = b"FKBM";
pub const FORMAT_MAJOR: u16 = 1;
pub const FORMAT_MINOR: u16 = 0;
const CHECKSUM_LEN: usize = 32;

const TAG_LEAF: u8 = 0;
const TAG_SPLIT: u8 = 1;

pub fn write_model(model: &Model) -> Vec<u8> {
    let mut buf = Vec::new();
    buf.extend_from_slice(MAGIC);
    let w = &mut buf;
    // Writes into a Vec cannot fail.
    w.write_u16::<LE>(FORMAT_MAJOR).unwrap();
    w.write_u16::<LE>(FORMAT_MINOR).unwrap();

    let run = model.run_config.as_bytes();
    w.write_u32::<LE>(run.len() as u32).unwrap();
    w.extend_from_slice(run);

    let c = &model.config;
    w.write_u64::<LE>(c.n_trees as u64).unwrap();
    w.write_f64::<LE>(c.learning_rate).unwrap();
    w.write_u32::<LE>(c.max_depth as u32).unwrap();
    for v in [c.lambda, c.gamma, c.min_child_hessian, c.base_score] {
        w.write_f64::<LE>(v).unwrap();
    }
    w.write_u64::<LE>(c.seed).unwrap();
    for v in [c.subsample, c.colsample, c.pos_weight] {
        w.write_f64::<LE>(v).unwrap();
    }

    let spans = model.schema.spans();
    w.write_u32::<LE>(spans.len() as u32).unwrap();
    for (cat, r) in spans {
        let name = cat.as_str().as_bytes();
        w.write_u8(name.len() as u8).unwrap();
        w.extend_from_slice(name);
        w.write_u32::<LE>(r.len() as u32).unwrap();
    }
    w.write_u64::<LE>(model.schema.fingerprint()).unwrap();

    let s = &model.stats;
    w.write_u32::<LE>(s.dim() as u32).unwrap();
    w.write_u64::<LE>(s.n_samples).unwrap();
    for &v in s.mean.iter().chain(&s.std) {
        w.write_f64::<LE>(v).unwrap();
    }

    write_ensemble(w, &model.ensemble);
    match &model.segment_ensemble {
        None => w.write_u8(0).unwrap(),
        Some(e) => {
            w.write_u8(1).unwrap();
            write_ensemble(w, e);
        }
    }

    let digest = Sha256::digest(&buf);
    buf.extend_from_slice(&digest);
    buf
}

fn write_ensemble(w: &mut Vec<u8>, e: &TreeEnsemble) {
    w.write_f64::<LE>(e.base_score).unwrap();
    w.write_f64::<LE>(e.learning_rate).unwrap();
    w.write_u32::<LE>(e.n_features as u32).unwrap();
    w.write_u32::<LE>(e.trees.len() as u32).unwrap();
    for tree in &e.trees {
        w.write_u32::<LE>(tree.nodes().len() as u32).unwrap();
        write_preorder(w, tree.nodes(), 0);
    }
}

fn write_preorder(w: &mut Vec<u8>, nodes: &[Node], i: usize) {
    match nodes[i] {
        Node::Leaf { weight } => {
            w.write_u8(TAG_LEAF).unwrap();
            w.write_f64::<LE>(weight).unwrap();
        }
        Node::Split {
            feature,
            threshold,
            gain,
            left,
            right,
        } => {
            w.write_u8(TAG_SPLIT).unwrap();
            w.write_u32::<LE>(feature as u32).unwrap();
            w.write_f64::<LE>(threshold).unwrap();
            w.write_f64::<LE>(gain).unwrap();
            write_preorder(w, nodes, left);
            write_preorder(w, nodes, right);
        }
    }
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptModel(msg.into())
}

pub fn read_model(bytes: &[u8]) -> Result<Model> {
    if bytes.len() < 8 || &bytes[..4] != MAGIC {
        return Err(corrupt("missing FKBM header"));
    }
    let major = u16::from_le_bytes([bytes[4], bytes[5]]);
    let minor = u16::from_le_bytes([bytes[6], bytes[7]]);
    if major != FORMAT_MAJOR {
        return Err(Error::VersionMismatch {
            found_major: major,
            found_minor: minor,
            supported_major: FORMAT_MAJOR,
        });
    }
    if bytes.len() < 8 + CHECKSUM_LEN {
        return Err(corrupt("file truncated"));
    }
    let (body, sum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
    if Sha256::digest(body).as_slice() != sum {
        return Err(corrupt("checksum mismatch"));
    }

    let mut r = Cursor::new(&body[8..]);
    let eof = |_| corrupt("unexpected end of data");

    let run_len = r.read_u32::<LE>().map_err(eof)? as usize;
    let mut run = vec![0u8; run_len];
    r.read_exact(&mut run).map_err(eof)?;
    let run_config = String::from_utf8(run).map_err(|_| corrupt("run config is not UTF-8"))?;

    let n_trees = r.read_u64::<LE>().map_err(eof)? as usize;
    let learning_rate = r.read_f64::<LE>().map_err(eof)?;
    let max_depth = r.read_u32::<LE>().map_err(eof)? as usize;
    let lambda = r.read_f64::<LE>().map_err(eof)?;
    let gamma = r.read_f64::<LE>().map_err(eof)?;
    let min_child_hessian = r.read_f64::<LE>().map_err(eof)?;
    let base_score = r.read_f64::<LE>().map_err(eof)?;
    let seed = r.read_u64::<LE>().map_err(eof)?;
    let subsample = r.read_f64::<LE>().map_err(eof)?;
    let colsample = r.read_f64::<LE>().map_err(eof)?;
    let pos_weight = r.read_f64::<LE>().map_err(eof)?;
    let config = TrainConfig {
        n_trees,
        learning_rate,
        max_depth,
        lambda,
        gamma,
        min_child_hessian,
        base_score,
        seed,
        subsample,
        colsample,
        pos_weight,
    };

    let n_cats = r.read_u32::<LE>().map_err(eof)? as usize;
    let mut widths = Vec::with_capacity(n_cats.min(16));
    for _ in 0..n_cats {
        let len = r.read_u8().map_err(eof)? as usize;
        let mut name = vec![0u8; len];
        r.read_exact(&mut name).map_err(eof)?;
        let name = String::from_utf8(name).map_err(|_| corrupt("category name is not UTF-8"))?;
        let cat: Category = name.parse().map_err(|_| corrupt(format!("unknown category {name}")))?;
        widths.push((cat, r.read_u32::<LE>().map_err(eof)? as usize));
    }
    let schema = FeatureSchema::new(&widths).map_err(|e| corrupt(e.to_string()))?;
    let fingerprint = r.read_u64::<LE>().map_err(eof)?;
    if fingerprint != schema.fingerprint() {
        return Err(corrupt("schema fingerprint does not match schema block"));
    }

    let dim = r.read_u32::<LE>().map_err(eof)? as usize;
    let n_samples = r.read_u64::<LE>().map_err(eof)?;
    let read_vec = |r: &mut Cursor<&[u8]>| -> Result<Vec<f64>> {
        (0..dim).map(|_| r.read_f64::<LE>().map_err(eof)).collect()
    };
    let mean = read_vec(&mut r)?;
    let std = read_vec(&mut r)?;
    let stats = StandardizationStats { mean, std, n_samples };

    let ensemble = read_ensemble(&mut r)?;
    let segment_ensemble = match r.read_u8().map_err(eof)? {
        0 => None,
        1 => Some(read_ensemble(&mut r)?),
        flag => return Err(corrupt(format!("bad segment-ensemble flag {flag}"))),
    };
    if (r.position() as usize) != body.len() - 8 {
        return Err(corrupt("trailing bytes after trees"));
    }

    let model = Model::new(ensemble, stats, schema, config, run_config).map_err(|e| corrupt(e.to_string()))?;
    match segment_ensemble {
        None => Ok(model),
        Some(e) => model.with_segment_ensemble(e).map_err(|e| corrupt(e.to_string())),
    }
}

fn read_ensemble(r: &mut Cursor<&[u8]>) -> Result<TreeEnsemble> {
    let eof = |_| corrupt("unexpected end of data");
    let base_score = r.read_f64::<LE>().map_err(eof)?;
    let learning_rate = r.read_f64::<LE>().map_err(eof)?;
    let n_features = r.read_u32::<LE>().map_err(eof)? as usize;
    let n_trees = r.read_u32::<LE>().map_err(eof)? as usize;
    let mut trees = Vec::with_capacity(n_trees.min(1 << 16));
    for t in 0..n_trees {
        let n_nodes = r.read_u32::<LE>().map_err(eof)? as usize;
        let mut nodes = Vec::with_capacity(n_nodes.min(1 << 20));
        read_preorder(r, &mut nodes, n_features, 0)?;
        if nodes.len() != n_nodes {
            return Err(corrupt(format!("tree {t}: expected {n_nodes} nodes, read {}", nodes.len())));
        }
        trees.push(Tree::from_nodes(nodes));
    }
    Ok(TreeEnsemble {
        trees,
        learning_rate,
        base_score,
        n_features,
    })
}

fn read_preorder(r: &mut Cursor<&[u8]>, nodes: &mut Vec<Node>, n_features: usize, depth: usize) -> Result<usize> {
    if depth > 256 {
        return Err(corrupt("tree deeper than 256 levels"));
    }
    let eof = |_| corrupt("unexpected end of data");
    let id = nodes.len();
    match r.read_u8().map_err(eof)? {
        TAG_LEAF => nodes.push(Node::Leaf {
            weight: r.read_f64::<LE>().map_err(eof)?,
        }),
        TAG_SPLIT => {
            let feature = r.read_u32::<LE>().map_err(eof)? as usize;
            if feature >= n_features {
                return Err(corrupt(format!("split on feature {feature} of {n_features}")));
            }
            let threshold = r.read_f64::<LE>().map_err(eof)?;
            let gain = r.read_f64::<LE>().map_err(eof)?;
            nodes.push(Node::Split {
                feature,
                threshold,
                gain,
                left: 0,
                right: 0,
            });
            let left = read_preorder(r, nodes, n_features, depth + 1)?;
            let right = read_preorder(r, nodes, n_features, depth + 1)?;
            if let Node::Split { left: l, right: rt, .. } = &mut nodes[id] {
                *l = left;
                *rt = right;
            }
        }
        tag => return Err(corrupt(format!("unknown node tag {tag}"))),
    }
    Ok(id)
}

pub fn save_model(model: &Model, path: &Path) -> Result<()> {
    std::fs::write(path, write_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<Model> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    read_model(&bytes)
}
