//! Greechie block diagrams: a plain-text language for small quantum logics
//! and the pasting construction that turns a diagram into a lattice.
//!
//! Each block names the atoms of one maximal Boolean context. Pasting glues
//! the per-block powerset algebras together, identifying 0, I, shared atoms,
//! and the per-block complements of shared atoms. The result must pass the
//! full ortholattice checks and the orthomodular law or the diagram is
//! rejected.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::lattice::{Lattice, LatticeError, TABLE_ELEMENT_CAP};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GreechieError {
    #[error("line {line}: expected `block: <atom> <atom> ...`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: invalid atom label `{label}`")]
    BadLabel { line: usize, label: String },
    #[error("line {line}: block has no atoms")]
    EmptyBlock { line: usize },
    #[error("line {line}: block needs at least 2 distinct atoms")]
    BlockTooSmall { line: usize },
    #[error("line {line}: duplicate atom `{label}` within a block")]
    DuplicateAtom { line: usize, label: String },
    #[error("blocks at lines {first_line} and {second_line} share {} atoms: {}", shared.len(), shared.join(", "))]
    BlocksShareTooMany {
        first_line: usize,
        second_line: usize,
        shared: Vec<String>,
    },
    #[error("diagram has no blocks")]
    NoBlocks,
    #[error("pasting identifies atom `{atom}` with a non-atom or a different atom")]
    AtomDegenerate { atom: String },
    #[error("pasting collapses the order between `{a}` and `{b}`")]
    OrderCollapse { a: String, b: String },
    #[error("pasting would produce {elements} elements, above the {cap}-element cap")]
    TooLarge { elements: usize, cap: usize },
    #[error("pasted structure is not an ortholattice: {0}")]
    NotOrtholattice(LatticeError),
    #[error("pasted structure violates the orthomodular law at `{a}`, `{b}`")]
    NotOrthomodular { a: String, b: String },
}

/// A parsed diagram: ordered blocks of atom labels plus the deduplicated
/// atom universe in first-appearance order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreechieDiagram {
    blocks: Vec<Vec<String>>,
    block_lines: Vec<usize>,
    atom_universe: Vec<String>,
}

impl GreechieDiagram {
    pub fn blocks(&self) -> &[Vec<String>] {
        &self.blocks
    }

    pub fn atom_universe(&self) -> &[String] {
        &self.atom_universe
    }
}

impl fmt::Display for GreechieDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for block in &self.blocks {
            writeln!(f, "block: {}", block.join(" "))?;
        }
        Ok(())
    }
}

fn valid_label(label: &str) -> bool {
    let mut chars = label.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses the diagram language: one `block:` directive per line, `#` starts
/// a comment, blank lines are skipped. Errors carry 1-based line numbers.
pub fn parse_diagram(text: &str) -> Result<GreechieDiagram, GreechieError> {
    let mut blocks: Vec<Vec<String>> = Vec::new();
    let mut block_lines: Vec<usize> = Vec::new();
    let mut atom_universe: Vec<String> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let rest = content
            .strip_prefix("block:")
            .ok_or_else(|| GreechieError::Syntax {
                line,
                text: content.to_string(),
            })?;
        let labels: Vec<&str> = rest.split_whitespace().collect();
        if labels.is_empty() {
            return Err(GreechieError::EmptyBlock { line });
        }
        let mut seen = BTreeSet::new();
        for &label in &labels {
            if !valid_label(label) {
                return Err(GreechieError::BadLabel {
                    line,
                    label: label.to_string(),
                });
            }
            if !seen.insert(label) {
                return Err(GreechieError::DuplicateAtom {
                    line,
                    label: label.to_string(),
                });
            }
        }
        if labels.len() < 2 {
            return Err(GreechieError::BlockTooSmall { line });
        }
        for &label in &labels {
            if !atom_universe.iter().any(|a| a == label) {
                atom_universe.push(label.to_string());
            }
        }
        blocks.push(labels.into_iter().map(String::from).collect());
        block_lines.push(line);
    }

    if blocks.is_empty() {
        return Err(GreechieError::NoBlocks);
    }

    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let shared: Vec<String> = blocks[i]
                .iter()
                .filter(|a| blocks[j].contains(a))
                .cloned()
                .collect();
            if shared.len() > 1 {
                return Err(GreechieError::BlocksShareTooMany {
                    first_line: block_lines[i],
                    second_line: block_lines[j],
                    shared,
                });
            }
        }
    }

    Ok(GreechieDiagram {
        blocks,
        block_lines,
        atom_universe,
    })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Pastes the diagram's blocks into a lattice.
///
/// Elements are equivalence classes of per-block subsets; subsets from
/// different blocks are identified exactly when both are empty, both full,
/// both the same shared atom, or both the in-block complement of the same
/// shared atom. The pasted order is the transitive closure of the per-block
/// inclusion orders. Any failure of the ortholattice laws or of the
/// orthomodular law rejects the diagram.
pub fn paste(diagram: &GreechieDiagram) -> Result<Lattice, GreechieError> {
    let blocks = &diagram.blocks;
    let universe = &diagram.atom_universe;
    let atom_index = |label: &str| universe.iter().position(|a| a == label).unwrap();

    // Per-block atom lists as universe indices.
    let block_atoms: Vec<Vec<usize>> = blocks
        .iter()
        .map(|b| b.iter().map(|l| atom_index(l)).collect())
        .collect();

    let node_count: usize = block_atoms.iter().map(|b| 1usize << b.len()).sum();
    if node_count > 16 * TABLE_ELEMENT_CAP {
        return Err(GreechieError::TooLarge {
            elements: node_count,
            cap: TABLE_ELEMENT_CAP,
        });
    }
    let mut offsets = Vec::with_capacity(block_atoms.len());
    let mut acc = 0usize;
    for b in &block_atoms {
        offsets.push(acc);
        acc += 1usize << b.len();
    }
    let node = |bi: usize, mask: usize| offsets[bi] + mask;

    // Identify nodes across blocks.
    let mut uf = UnionFind::new(node_count);
    for bi in 1..block_atoms.len() {
        uf.union(node(0, 0), node(bi, 0));
        uf.union(
            node(0, (1 << block_atoms[0].len()) - 1),
            node(bi, (1 << block_atoms[bi].len()) - 1),
        );
    }
    for (u, _) in universe.iter().enumerate() {
        let mut first_single: Option<usize> = None;
        let mut first_co: Option<usize> = None;
        for (bi, atoms) in block_atoms.iter().enumerate() {
            if let Some(pos) = atoms.iter().position(|&a| a == u) {
                let full = (1usize << atoms.len()) - 1;
                let single = node(bi, 1 << pos);
                let co = node(bi, full & !(1 << pos));
                match first_single {
                    None => first_single = Some(single),
                    Some(f) => uf.union(f, single),
                }
                match first_co {
                    None => first_co = Some(co),
                    Some(f) => uf.union(f, co),
                }
            }
        }
    }

    // Atom classes must stay pure: the class of a singleton may contain
    // nothing but singletons of the same atom, otherwise the diagram
    // identifies an atom away (e.g. two 2-atom blocks sharing an atom).
    let mut class_of_node = vec![usize::MAX; node_count];
    let mut roots: Vec<usize> = Vec::new();
    for (bi, atoms) in block_atoms.iter().enumerate() {
        for mask in 0..1usize << atoms.len() {
            let id = node(bi, mask);
            let root = uf.find(id);
            if class_of_node[root] == usize::MAX {
                class_of_node[root] = roots.len();
                roots.push(root);
            }
            class_of_node[id] = class_of_node[root];
        }
    }
    let class_count = roots.len();
    if class_count > TABLE_ELEMENT_CAP {
        return Err(GreechieError::TooLarge {
            elements: class_count,
            cap: TABLE_ELEMENT_CAP,
        });
    }

    // Representatives per class, in (block, mask) order.
    let mut reps: Vec<Vec<(usize, usize)>> = vec![Vec::new(); class_count];
    for (bi, atoms) in block_atoms.iter().enumerate() {
        for mask in 0..1usize << atoms.len() {
            reps[class_of_node[node(bi, mask)]].push((bi, mask));
        }
    }
    for (u, label) in universe.iter().enumerate() {
        let (bi, atoms) = block_atoms
            .iter()
            .enumerate()
            .find(|(_, atoms)| atoms.contains(&u))
            .expect("every universe atom appears in a block");
        let pos = atoms.iter().position(|&a| a == u).unwrap();
        let class = class_of_node[node(bi, 1 << pos)];
        for &(rbi, rmask) in &reps[class] {
            let single_of_u =
                rmask.count_ones() == 1 && block_atoms[rbi][rmask.trailing_zeros() as usize] == u;
            if !single_of_u {
                return Err(GreechieError::AtomDegenerate {
                    atom: label.clone(),
                });
            }
        }
    }

    // Canonical element order: bottom, atoms in universe order, middle
    // classes by first representative, top last.
    let bottom_class = class_of_node[node(0, 0)];
    let top_class = class_of_node[node(0, (1 << block_atoms[0].len()) - 1)];
    let atom_class = |u: usize| -> usize {
        let (bi, atoms) = block_atoms
            .iter()
            .enumerate()
            .find(|(_, atoms)| atoms.contains(&u))
            .unwrap();
        let pos = atoms.iter().position(|&a| a == u).unwrap();
        class_of_node[node(bi, 1 << pos)]
    };
    let mut order: Vec<usize> = Vec::with_capacity(class_count);
    order.push(bottom_class);
    for u in 0..universe.len() {
        order.push(atom_class(u));
    }
    let mut middles: Vec<usize> = (0..class_count)
        .filter(|&c| c != bottom_class && c != top_class && !order.contains(&c))
        .collect();
    middles.sort_by_key(|&c| {
        let &(bi, mask) = reps[c].first().unwrap();
        (mask.count_ones(), bi, mask)
    });
    order.extend(middles);
    order.push(top_class);
    debug_assert_eq!(order.len(), class_count);

    let mut position = vec![usize::MAX; class_count];
    for (i, &c) in order.iter().enumerate() {
        position[c] = i;
    }

    // Names: 0, atom labels, x⊥ for in-block complements of atoms, joins of
    // the canonical representative's atoms otherwise, I.
    let label_of_mask = |bi: usize, mask: usize| -> Vec<&str> {
        block_atoms[bi]
            .iter()
            .enumerate()
            .filter(|(pos, _)| mask >> pos & 1 == 1)
            .map(|(_, &u)| universe[u].as_str())
            .collect()
    };
    let mut names = vec![String::new(); class_count];
    for (i, &c) in order.iter().enumerate() {
        names[i] = if c == bottom_class {
            "0".to_string()
        } else if c == top_class {
            "I".to_string()
        } else {
            let co_single = reps[c].iter().find_map(|&(bi, mask)| {
                let full = (1usize << block_atoms[bi].len()) - 1;
                let inv = full & !mask;
                (inv.count_ones() == 1).then(|| block_atoms[bi][inv.trailing_zeros() as usize])
            });
            match co_single {
                Some(u) if reps[c][0].1.count_ones() > 1 => {
                    format!("{}\u{22a5}", universe[u])
                }
                _ => {
                    let (bi, mask) = reps[c][0];
                    label_of_mask(bi, mask).join("\u{2228}")
                }
            }
        };
    }

    // Order: transitive closure of the per-block inclusion orders.
    let words = class_count.div_ceil(64);
    let mut above: Vec<u64> = vec![0; class_count * words];
    let set = |rows: &mut Vec<u64>, r: usize, c: usize| {
        rows[r * words + c / 64] |= 1u64 << (c % 64);
    };
    for i in 0..class_count {
        set(&mut above, i, i);
    }
    for (bi, atoms) in block_atoms.iter().enumerate() {
        let size = 1usize << atoms.len();
        for sub in 0..size {
            let from = position[class_of_node[node(bi, sub)]];
            for sup in 0..size {
                if sub & !sup == 0 {
                    let to = position[class_of_node[node(bi, sup)]];
                    set(&mut above, from, to);
                }
            }
        }
    }
    // Warshall closure on bit rows.
    for k in 0..class_count {
        for i in 0..class_count {
            if above[i * words + k / 64] >> (k % 64) & 1 == 1 {
                for w in 0..words {
                    let v = above[k * words + w];
                    above[i * words + w] |= v;
                }
            }
        }
    }
    let leq = |a: usize, b: usize| above[a * words + b / 64] >> (b % 64) & 1 == 1;
    for a in 0..class_count {
        for b in a + 1..class_count {
            if leq(a, b) && leq(b, a) {
                return Err(GreechieError::OrderCollapse {
                    a: names[a].clone(),
                    b: names[b].clone(),
                });
            }
        }
    }

    // Orthocomplement: complement the canonical representative in its block.
    let mut ortho = vec![0usize; class_count];
    for (i, &c) in order.iter().enumerate() {
        let (bi, mask) = reps[c][0];
        let full = (1usize << block_atoms[bi].len()) - 1;
        ortho[i] = position[class_of_node[node(bi, full & !mask)]];
    }

    let lattice =
        Lattice::from_order(names.clone(), ortho, leq).map_err(GreechieError::NotOrtholattice)?;
    lattice
        .verify_orthomodular()
        .map_err(|v| GreechieError::NotOrthomodular {
            a: lattice.element_name(v.a),
            b: lattice.element_name(v.b),
        })?;
    Ok(lattice)
}
