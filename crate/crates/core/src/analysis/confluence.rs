//! Coalescence structure of geodesics into a common target: geodesics from
//! distinct sources tend to merge before reaching the target, and the shared
//! suffixes form a forest.

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::sampler::Scene;
use crate::solver::geodesic_between;
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Debug, Serialize)]
pub struct CoalescenceNode {
    pub position: Point,
    /// Indices into `leaves` of the sources whose geodesics merge here.
    pub leaves: Vec<u32>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConfluenceTree {
    pub target: Point,
    pub leaves: Vec<Point>,
    /// Vertex polyline of each leaf's geodesic, in travel order.
    pub paths: Vec<Vec<Point>>,
    /// Junctions where at least two branches meet, deepest-first.
    pub coalescence_nodes: Vec<CoalescenceNode>,
    /// Positions where two or more leaves first share all subsequent nodes.
    pub cut_points: Vec<Point>,
}

struct TrieNode {
    key: (u64, u64),
    position: Point,
    children: Vec<usize>,
    /// Leaves whose reversed path ends exactly here.
    terminal_leaves: Vec<u32>,
    /// All leaves passing through this node.
    leaves: Vec<u32>,
}

/// Compute geodesics from every source to the target and build the
/// suffix-coalescence forest of their vertex sequences. Vertices are
/// compared bit-exactly: shared suffixes are genuinely identical because
/// intersection and refraction nodes are deterministic functions of the
/// scene and the target.
pub fn confluence_tree(
    scene: &Scene,
    target: Point,
    sources: &[Point],
    eps: f64,
) -> Result<ConfluenceTree> {
    if sources.iter().any(|s| s.bits() == target.bits()) {
        return Err(Error::invalid(
            "sources",
            "sources must be distinct from the target",
        ));
    }
    let paths: Vec<Vec<Point>> = sources
        .iter()
        .map(|&s| {
            let path = geodesic_between(scene, s, target, eps);
            let mut v = path.vertices();
            if v.is_empty() {
                v = vec![s, target];
            }
            v
        })
        .collect();

    // trie over reversed vertex sequences rooted at the target
    let mut nodes: Vec<TrieNode> = Vec::new();
    let mut roots: HashMap<(u64, u64), usize> = HashMap::new();
    for (leaf, path) in paths.iter().enumerate() {
        let leaf = leaf as u32;
        let mut cursor: Option<usize> = None;
        for &p in path.iter().rev() {
            let key = p.bits();
            let slot = match cursor {
                None => *roots.entry(key).or_insert_with(|| {
                    nodes.push(new_node(key, p));
                    nodes.len() - 1
                }),
                Some(parent) => {
                    match nodes[parent]
                        .children
                        .iter()
                        .copied()
                        .find(|&c| nodes[c].key == key)
                    {
                        Some(c) => c,
                        None => {
                            nodes.push(new_node(key, p));
                            let c = nodes.len() - 1;
                            nodes[parent].children.push(c);
                            c
                        }
                    }
                }
            };
            nodes[slot].leaves.push(leaf);
            cursor = Some(slot);
        }
        if let Some(last) = cursor {
            nodes[last].terminal_leaves.push(leaf);
        }
    }

    // a junction is a node where at least two branches (subtrees or
    // terminating leaves) come together
    let mut coalescence_nodes = Vec::new();
    for node in &nodes {
        let branches = node.children.len() + node.terminal_leaves.len();
        if branches >= 2 && node.leaves.len() >= 2 {
            let mut leaves = node.leaves.clone();
            leaves.dedup();
            coalescence_nodes.push(CoalescenceNode {
                position: node.position,
                leaves,
            });
        }
    }
    let cut_points = coalescence_nodes.iter().map(|c| c.position).collect();
    Ok(ConfluenceTree {
        target,
        leaves: sources.to_vec(),
        paths,
        coalescence_nodes,
        cut_points,
    })
}

fn new_node(key: (u64, u64), position: Point) -> TrieNode {
    TrieNode {
        key,
        position,
        children: Vec::new(),
        terminal_leaves: Vec::new(),
        leaves: Vec::new(),
    }
}

impl ConfluenceTree {
    /// Structural audit: for every pair of leaves, the suffixes after their
    /// deepest shared vertex must be identical vertex sequences (this is the
    /// forest property: branches never re-merge).
    pub fn audit(&self) -> bool {
        for a in 0..self.paths.len() {
            for b in (a + 1)..self.paths.len() {
                let pa = &self.paths[a];
                let pb = &self.paths[b];
                // longest common suffix
                let mut k = 0;
                while k < pa.len() && k < pb.len() {
                    if pa[pa.len() - 1 - k].bits() != pb[pb.len() - 1 - k].bits() {
                        break;
                    }
                    k += 1;
                }
                // no shared vertex may appear before the common suffix
                let pa_prefix = &pa[..pa.len() - k];
                let pb_prefix = &pb[..pb.len() - k];
                for va in pa_prefix {
                    for vb in pb_prefix {
                        if va.bits() == vb.bits() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}
