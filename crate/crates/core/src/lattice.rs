//! Finite bounded ortholattices.
//!
//! A lattice is either backed by subset masks (powerset algebras, where the
//! element id *is* the bitmask over atoms) or by explicit order tables
//! (everything else: horizontal sums, pasted block diagrams, hand-built
//! fixtures). Both backings expose the same operations: `leq`, `meet`,
//! `join`, `ortho`, bounds, atoms.
//!
//! Construction is checked. `from_order` verifies every ortholattice law
//! (partial order, totality of meets and joins, involution, order reversal,
//! complement laws, De Morgan) and the family constructors additionally
//! require the orthomodular law. The one deliberate gap: `from_order` does
//! *not* require orthomodularity, so non-orthomodular ortholattices such as
//! the benzene ring can be built and handed to `verify_orthomodular`.

use std::fmt;

use thiserror::Error;

/// Hard ceiling for explicit order tables. Powerset-backed lattices may be
/// larger; their laws hold structurally and exhaustive scans are skipped
/// above this many elements.
pub const TABLE_ELEMENT_CAP: usize = 4096;

/// Atom ceiling for `Lattice::boolean`: 2^12 elements is the exhaustive
/// search budget.
pub const BOOLEAN_ATOM_CAP: usize = 12;

/// Index of a lattice element. For powerset-backed lattices the index is the
/// atom bitmask; for table-backed lattices it is a row index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementId(pub usize);

impl fmt::Display for ElementId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("atom count {got} outside 1..={cap}")]
    BadAtomCount { got: usize, cap: usize },
    #[error("element count {got} exceeds the explicit-table cap {cap}")]
    TooLarge { got: usize, cap: usize },
    #[error("lattice needs at least one element")]
    Empty,
    #[error("orthocomplement table has length {got}, expected {expected}")]
    OrthoLength { got: usize, expected: usize },
    #[error("orthocomplement of {0} out of range")]
    OrthoRange(ElementId),
    #[error("order not reflexive at {0}")]
    NotReflexive(ElementId),
    #[error("order not antisymmetric at {0}, {1}")]
    NotAntisymmetric(ElementId, ElementId),
    #[error("order not transitive through {0} <= {1} <= missing bound")]
    NotTransitive(ElementId, ElementId),
    #[error("no bottom element")]
    NoBottom,
    #[error("no top element")]
    NoTop,
    #[error("pair {0}, {1} has no meet")]
    MissingMeet(ElementId, ElementId),
    #[error("pair {0}, {1} has no join")]
    MissingJoin(ElementId, ElementId),
    #[error("orthocomplement is not an involution at {0}")]
    OrthoNotInvolution(ElementId),
    #[error("orthocomplement not order-reversing on {0} <= {1}")]
    OrthoNotOrderReversing(ElementId, ElementId),
    #[error("complement law x v x' = I fails at {0}")]
    ComplementJoinFails(ElementId),
    #[error("complement law x ^ x' = 0 fails at {0}")]
    ComplementMeetFails(ElementId),
    #[error("De Morgan identity fails at {0}, {1}")]
    DeMorganFails(ElementId, ElementId),
    #[error("orthomodular law fails: {0} <= {1} but {1} != {0} v ({1} ^ {0}')")]
    NotOrthomodular(ElementId, ElementId),
}

/// Witness that the orthomodular law fails: `a <= b` yet
/// `b != a v (b ^ a')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrthomodularViolation {
    pub a: ElementId,
    pub b: ElementId,
}

/// Witness that distributivity fails:
/// `a v (b ^ c) != (a v b) ^ (a v c)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistributivityViolation {
    pub a: ElementId,
    pub b: ElementId,
    pub c: ElementId,
}

/// Square bit matrix with u64-packed rows; row `r` stores a subset of
/// element indices.
#[derive(Clone)]
struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / 64] |= 1u64 << (c % 64);
    }

    #[inline]
    fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    fn row(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    fn row_is_subset(&self, sub: usize, sup: usize) -> bool {
        let a = self.row(sub);
        let b = self.row(sup);
        a.iter().zip(b).all(|(x, y)| x & !y == 0)
    }

    fn iter_row(&self, r: usize) -> impl Iterator<Item = usize> + '_ {
        let row = self.row(r);
        (0..self.n).filter(move |&c| row[c / 64] >> (c % 64) & 1 == 1)
    }

    /// Intersection of two rows as a fresh word vector.
    fn row_and(&self, a: usize, b: usize) -> Vec<u64> {
        self.row(a)
            .iter()
            .zip(self.row(b))
            .map(|(x, y)| x & y)
            .collect()
    }
}

fn words_iter(words: &[u64], n: usize) -> impl DoubleEndedIterator<Item = usize> + '_ {
    (0..n).filter(move |&c| words[c / 64] >> (c % 64) & 1 == 1)
}

fn words_subset(sub: &[u64], sup: &[u64]) -> bool {
    sub.iter().zip(sup).all(|(x, y)| x & !y == 0)
}

#[derive(Clone)]
struct TableLattice {
    n: usize,
    /// `above.get(x, y)` iff `x <= y`: row x is the upper set of x.
    above: BitMatrix,
    ortho: Vec<u32>,
    meet: Vec<u32>,
    join: Vec<u32>,
    bottom: u32,
    top: u32,
    names: Vec<String>,
    atoms: Vec<u32>,
}

#[derive(Clone)]
enum Backing {
    Subsets { atom_names: Vec<String> },
    Table(Box<TableLattice>),
}

/// A finite bounded ortholattice. Immutable once constructed; every
/// operation is a pure read, so sharing across threads is safe.
#[derive(Clone)]
pub struct Lattice {
    backing: Backing,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.backing {
            Backing::Subsets { atom_names } => {
                write!(f, "Lattice(powerset, {} atoms)", atom_names.len())
            }
            Backing::Table(t) => write!(f, "Lattice(table, {} elements)", t.n),
        }
    }
}

impl Lattice {
    /// Powerset algebra on the given atoms. The element id is the bitmask
    /// over atoms in argument order; 0 is bottom, the full mask is top.
    pub fn boolean<S: Into<String>, I: IntoIterator<Item = S>>(
        atom_names: I,
    ) -> Result<Lattice, LatticeError> {
        let names: Vec<String> = atom_names.into_iter().map(Into::into).collect();
        if names.is_empty() || names.len() > BOOLEAN_ATOM_CAP {
            return Err(LatticeError::BadAtomCount {
                got: names.len(),
                cap: BOOLEAN_ATOM_CAP,
            });
        }
        let lattice = Lattice::powerset_unchecked(names);
        // Structurally guaranteed, but the constructors promise to run it.
        lattice
            .verify_orthomodular()
            .map_err(|v| LatticeError::NotOrthomodular(v.a, v.b))?;
        Ok(lattice)
    }

    /// Powerset backing without the atom-count cap. Used by dyadic
    /// refinement, whose targets legitimately exceed `BOOLEAN_ATOM_CAP`.
    /// All ortholattice laws hold structurally for subset algebras.
    pub(crate) fn powerset_unchecked(atom_names: Vec<String>) -> Lattice {
        debug_assert!(!atom_names.is_empty());
        Lattice {
            backing: Backing::Subsets { atom_names },
        }
    }

    /// MO_n: the horizontal sum of n four-element blocks. 2n + 2 elements;
    /// atoms from different blocks meet at 0 and join at I.
    pub fn mo(n: usize) -> Result<Lattice, LatticeError> {
        if n == 0 {
            return Err(LatticeError::BadAtomCount {
                got: 0,
                cap: usize::MAX,
            });
        }
        let count = 2 * n + 2;
        if count > TABLE_ELEMENT_CAP {
            return Err(LatticeError::TooLarge {
                got: count,
                cap: TABLE_ELEMENT_CAP,
            });
        }
        let mut names = Vec::with_capacity(count);
        names.push("0".to_string());
        for i in 0..n {
            let base = if n <= 26 {
                ((b'a' + i as u8) as char).to_string()
            } else {
                format!("a{}", i + 1)
            };
            names.push(base.clone());
            names.push(format!("{base}\u{22a5}"));
        }
        names.push("I".to_string());
        let top = count - 1;
        let mut ortho = vec![0usize; count];
        ortho[0] = top;
        ortho[top] = 0;
        for i in 0..n {
            ortho[2 * i + 1] = 2 * i + 2;
            ortho[2 * i + 2] = 2 * i + 1;
        }
        let lattice = Lattice::from_order(names, ortho, |a, b| a == b || a == 0 || b == top)?;
        lattice
            .verify_orthomodular()
            .map_err(|v| LatticeError::NotOrthomodular(v.a, v.b))?;
        Ok(lattice)
    }

    /// The benzene-ring ortholattice O6: two chains 0 < a < b < I and
    /// 0 < b' < a' < I. A valid ortholattice that is not orthomodular; the
    /// canonical test input for `verify_orthomodular`.
    pub fn o6() -> Lattice {
        let names = ["0", "a", "b", "b\u{22a5}", "a\u{22a5}", "I"]
            .into_iter()
            .map(String::from)
            .collect();
        let ortho = vec![5, 4, 3, 2, 1, 0];
        let chains: &[&[usize]] = &[&[0, 1, 2, 5], &[0, 3, 4, 5]];
        Lattice::from_order(names, ortho, |a, b| {
            chains.iter().any(|chain| {
                let pa = chain.iter().position(|&x| x == a);
                let pb = chain.iter().position(|&x| x == b);
                matches!((pa, pb), (Some(i), Some(j)) if i <= j)
            })
        })
        .expect("O6 is a well-formed ortholattice")
    }

    /// Builds an explicit table lattice from an order predicate and an
    /// orthocomplement permutation, verifying every ortholattice law.
    /// Deliberately does not require orthomodularity; the family
    /// constructors layer `verify_orthomodular` on top.
    pub fn from_order<F: Fn(usize, usize) -> bool>(
        names: Vec<String>,
        ortho: Vec<usize>,
        leq: F,
    ) -> Result<Lattice, LatticeError> {
        let n = names.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if n > TABLE_ELEMENT_CAP {
            return Err(LatticeError::TooLarge {
                got: n,
                cap: TABLE_ELEMENT_CAP,
            });
        }
        if ortho.len() != n {
            return Err(LatticeError::OrthoLength {
                got: ortho.len(),
                expected: n,
            });
        }
        if let Some(&bad) = ortho.iter().find(|&&x| x >= n) {
            return Err(LatticeError::OrthoRange(ElementId(bad)));
        }

        let mut below = BitMatrix::new(n);
        let mut above = BitMatrix::new(n);
        for a in 0..n {
            for b in 0..n {
                if leq(a, b) {
                    above.set(a, b);
                    below.set(b, a);
                }
            }
        }

        // Partial order.
        for x in 0..n {
            if !above.get(x, x) {
                return Err(LatticeError::NotReflexive(ElementId(x)));
            }
        }
        for x in 0..n {
            for y in above.iter_row(x) {
                if y != x && above.get(y, x) {
                    return Err(LatticeError::NotAntisymmetric(ElementId(x), ElementId(y)));
                }
            }
        }
        for x in 0..n {
            for y in above.iter_row(x) {
                if !above.row_is_subset(y, x) {
                    return Err(LatticeError::NotTransitive(ElementId(x), ElementId(y)));
                }
            }
        }

        // Bounds.
        let bottom = (0..n)
            .find(|&x| above.iter_row(x).count() == n)
            .ok_or(LatticeError::NoBottom)?;
        let top = (0..n)
            .find(|&x| below.iter_row(x).count() == n)
            .ok_or(LatticeError::NoTop)?;

        // Meets and joins must exist for every pair. The glb of (a, b) is
        // the unique z in lower(a) & lower(b) dominating the whole
        // intersection; scanning candidates from the top down finds it
        // quickly on lattices indexed bottom-up.
        let mut meet = vec![0u32; n * n];
        let mut join = vec![0u32; n * n];
        for a in 0..n {
            for b in a..n {
                let lower = below.row_and(a, b);
                let glb = words_iter(&lower, n)
                    .rev()
                    .find(|&z| words_subset(&lower, below.row(z)));
                let glb = match glb {
                    Some(z) => z,
                    None => return Err(LatticeError::MissingMeet(ElementId(a), ElementId(b))),
                };
                let upper = above.row_and(a, b);
                let lub = words_iter(&upper, n).find(|&z| words_subset(&upper, above.row(z)));
                let lub = match lub {
                    Some(z) => z,
                    None => return Err(LatticeError::MissingJoin(ElementId(a), ElementId(b))),
                };
                meet[a * n + b] = glb as u32;
                meet[b * n + a] = glb as u32;
                join[a * n + b] = lub as u32;
                join[b * n + a] = lub as u32;
            }
        }

        // Orthocomplement laws.
        for x in 0..n {
            if ortho[ortho[x]] != x {
                return Err(LatticeError::OrthoNotInvolution(ElementId(x)));
            }
        }
        for x in 0..n {
            for y in above.iter_row(x) {
                if !above.get(ortho[y], ortho[x]) {
                    return Err(LatticeError::OrthoNotOrderReversing(
                        ElementId(x),
                        ElementId(y),
                    ));
                }
            }
        }
        for x in 0..n {
            if join[x * n + ortho[x]] as usize != top {
                return Err(LatticeError::ComplementJoinFails(ElementId(x)));
            }
            if meet[x * n + ortho[x]] as usize != bottom {
                return Err(LatticeError::ComplementMeetFails(ElementId(x)));
            }
        }
        for a in 0..n {
            for b in 0..n {
                let lhs = meet[a * n + b] as usize;
                let rhs = ortho[join[ortho[a] * n + ortho[b]] as usize];
                if lhs != rhs {
                    return Err(LatticeError::DeMorganFails(ElementId(a), ElementId(b)));
                }
            }
        }

        let atoms = (0..n)
            .filter(|&x| x != bottom && below.iter_row(x).count() == 2)
            .map(|x| x as u32)
            .collect();

        Ok(Lattice {
            backing: Backing::Table(Box::new(TableLattice {
                n,
                above,
                ortho: ortho.into_iter().map(|x| x as u32).collect(),
                meet,
                join,
                bottom: bottom as u32,
                top: top as u32,
                names,
                atoms,
            })),
        })
    }

    /// Element count. Powerset-backed lattices report 2^atoms, which may be
    /// far larger than anything worth enumerating.
    pub fn n(&self) -> usize {
        match &self.backing {
            Backing::Subsets { atom_names } => 1usize << atom_names.len(),
            Backing::Table(t) => t.n,
        }
    }

    /// True when the lattice is a powerset algebra by construction.
    pub fn is_powerset(&self) -> bool {
        matches!(self.backing, Backing::Subsets { .. })
    }

    pub fn bottom(&self) -> ElementId {
        match &self.backing {
            Backing::Subsets { .. } => ElementId(0),
            Backing::Table(t) => ElementId(t.bottom as usize),
        }
    }

    pub fn top(&self) -> ElementId {
        match &self.backing {
            Backing::Subsets { atom_names } => ElementId((1usize << atom_names.len()) - 1),
            Backing::Table(t) => ElementId(t.top as usize),
        }
    }

    #[inline]
    pub fn leq(&self, a: ElementId, b: ElementId) -> bool {
        match &self.backing {
            Backing::Subsets { .. } => a.0 & !b.0 == 0,
            Backing::Table(t) => t.above.get(a.0, b.0),
        }
    }

    #[inline]
    pub fn meet(&self, a: ElementId, b: ElementId) -> ElementId {
        match &self.backing {
            Backing::Subsets { .. } => ElementId(a.0 & b.0),
            Backing::Table(t) => ElementId(t.meet[a.0 * t.n + b.0] as usize),
        }
    }

    #[inline]
    pub fn join(&self, a: ElementId, b: ElementId) -> ElementId {
        match &self.backing {
            Backing::Subsets { .. } => ElementId(a.0 | b.0),
            Backing::Table(t) => ElementId(t.join[a.0 * t.n + b.0] as usize),
        }
    }

    #[inline]
    pub fn ortho(&self, a: ElementId) -> ElementId {
        match &self.backing {
            Backing::Subsets { atom_names } => ElementId(!a.0 & ((1usize << atom_names.len()) - 1)),
            Backing::Table(t) => ElementId(t.ortho[a.0] as usize),
        }
    }

    /// All minimal nonzero elements in ascending index order.
    pub fn atoms(&self) -> Vec<ElementId> {
        match &self.backing {
            Backing::Subsets { atom_names } => {
                (0..atom_names.len()).map(|i| ElementId(1 << i)).collect()
            }
            Backing::Table(t) => t.atoms.iter().map(|&x| ElementId(x as usize)).collect(),
        }
    }

    pub fn atom_count(&self) -> usize {
        match &self.backing {
            Backing::Subsets { atom_names } => atom_names.len(),
            Backing::Table(t) => t.atoms.len(),
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = ElementId> {
        (0..self.n()).map(ElementId)
    }

    /// Atoms lying below `x`, ascending.
    pub fn atoms_below(&self, x: ElementId) -> Vec<ElementId> {
        self.atoms()
            .into_iter()
            .filter(|&a| self.leq(a, x))
            .collect()
    }

    pub fn element_name(&self, x: ElementId) -> String {
        match &self.backing {
            Backing::Subsets { atom_names } => {
                let full = (1usize << atom_names.len()) - 1;
                if x.0 == 0 {
                    "0".to_string()
                } else if x.0.count_ones() == 1 {
                    atom_names[x.0.trailing_zeros() as usize].clone()
                } else if x.0 == full {
                    "I".to_string()
                } else {
                    let mut parts = Vec::new();
                    for (i, name) in atom_names.iter().enumerate() {
                        if x.0 >> i & 1 == 1 {
                            parts.push(name.as_str());
                        }
                    }
                    parts.join("\u{2228}")
                }
            }
            Backing::Table(t) => t.names[x.0].clone(),
        }
    }

    /// Looks up an element by its display name. Linear in the element count;
    /// powerset-backed lattices only resolve `0`, `I`, atom names, and
    /// join-of-atoms names, so this stays usable at any size.
    pub fn element_by_name(&self, name: &str) -> Option<ElementId> {
        match &self.backing {
            Backing::Subsets { atom_names } => {
                if name == "0" {
                    return Some(self.bottom());
                }
                if name == "I" {
                    return Some(self.top());
                }
                let mut mask = 0usize;
                for part in name.split('\u{2228}') {
                    let i = atom_names.iter().position(|n| n == part)?;
                    mask |= 1 << i;
                }
                Some(ElementId(mask))
            }
            Backing::Table(t) => t.names.iter().position(|n| n == name).map(ElementId),
        }
    }

    /// Resolves `a`, `a|b`, or `a∨b` to an element: each token is looked up
    /// by name and the results are folded with `join`.
    pub fn parse_element(&self, expr: &str) -> Result<ElementId, String> {
        let tokens: Vec<&str> = expr
            .split(['|', '\u{2228}'])
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .collect();
        if tokens.is_empty() {
            return Err("empty element expression".to_string());
        }
        let mut acc: Option<ElementId> = None;
        for token in tokens {
            let id = self
                .element_by_name(token)
                .ok_or_else(|| format!("unknown element `{token}`"))?;
            acc = Some(match acc {
                None => id,
                Some(prev) => self.join(prev, id),
            });
        }
        Ok(acc.expect("at least one token"))
    }

    /// Compatibility in the sense of a = (a^b) v (a^b'). Symmetric on
    /// orthomodular lattices; the debug assertion catches misuse on
    /// lattices that fail the orthomodular law.
    pub fn is_compatible(&self, a: ElementId, b: ElementId) -> bool {
        let forward = self.compatible_one_sided(a, b);
        debug_assert_eq!(
            forward,
            self.compatible_one_sided(b, a),
            "compatibility is only symmetric on orthomodular lattices"
        );
        forward
    }

    fn compatible_one_sided(&self, a: ElementId, b: ElementId) -> bool {
        let with_b = self.meet(a, b);
        let without_b = self.meet(a, self.ortho(b));
        self.join(with_b, without_b) == a
    }

    /// Exhaustive check of the orthomodular law; returns the first
    /// violating pair (a, b) with a <= b in lexicographic index order.
    /// Powerset-backed lattices above `TABLE_ELEMENT_CAP` elements skip the
    /// scan: subset algebras satisfy the law structurally.
    pub fn verify_orthomodular(&self) -> Result<(), OrthomodularViolation> {
        if self.is_powerset() && self.n() > TABLE_ELEMENT_CAP {
            return Ok(());
        }
        let n = self.n();
        for a in 0..n {
            let ea = ElementId(a);
            let ca = self.ortho(ea);
            for b in 0..n {
                let eb = ElementId(b);
                if !self.leq(ea, eb) {
                    continue;
                }
                if self.join(ea, self.meet(eb, ca)) != eb {
                    return Err(OrthomodularViolation { a: ea, b: eb });
                }
            }
        }
        Ok(())
    }

    /// Exhaustive check of distributivity over all triples; returns the
    /// first counterexample in lexicographic index order. Powerset-backed
    /// lattices above `TABLE_ELEMENT_CAP` elements skip the cubic scan
    /// (subset algebras are distributive structurally).
    pub fn is_distributive(&self) -> Result<(), DistributivityViolation> {
        if self.is_powerset() && self.n() > TABLE_ELEMENT_CAP {
            return Ok(());
        }
        let n = self.n();
        for a in 0..n {
            let ea = ElementId(a);
            for b in 0..n {
                let eb = ElementId(b);
                let a_join_b = self.join(ea, eb);
                for c in 0..n {
                    let ec = ElementId(c);
                    let lhs = self.join(ea, self.meet(eb, ec));
                    let rhs = self.meet(a_join_b, self.join(ea, ec));
                    if lhs != rhs {
                        return Err(DistributivityViolation {
                            a: ea,
                            b: eb,
                            c: ec,
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Maximal sets of pairwise-orthogonal atoms, each sorted ascending,
    /// listed in lexicographic order. These are the maximal Boolean blocks
    /// of the lattices built here: the single atom set for a powerset, the
    /// complementary pairs for MO_n, the diagram blocks for pastings.
    ///
    /// Exact up to 64 atoms. Beyond that only one maximal block per atom is
    /// reported (greedy), which is enough for the complementary-pair shape
    /// of large horizontal sums.
    pub fn orthogonal_blocks(&self) -> Vec<Vec<ElementId>> {
        if self.is_powerset() {
            return vec![self.atoms()];
        }
        let atoms = self.atoms();
        let k = atoms.len();
        let orthogonal = |i: usize, j: usize| i != j && self.leq(atoms[i], self.ortho(atoms[j]));

        let mut blocks: Vec<Vec<usize>> = Vec::new();
        if k <= 64 {
            let mut adj = vec![0u64; k];
            for i in 0..k {
                for j in 0..k {
                    if orthogonal(i, j) {
                        adj[i] |= 1 << j;
                    }
                }
            }
            fn walk(current: u64, candidates: u64, adj: &[u64], out: &mut Vec<u64>) {
                if candidates == 0 {
                    // Maximal iff no outside atom is orthogonal to all of it.
                    let maximal =
                        (0..adj.len()).all(|i| current >> i & 1 == 1 || current & !adj[i] != 0);
                    if current != 0 && maximal {
                        out.push(current);
                    }
                    return;
                }
                let v = candidates.trailing_zeros() as usize;
                let rest = candidates & !(1u64 << v);
                walk(current | 1 << v, rest & adj[v], adj, out);
                walk(current, rest, adj, out);
            }
            let full = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
            let mut cliques = Vec::new();
            walk(0, full, &adj, &mut cliques);
            cliques.sort_unstable();
            cliques.dedup();
            for c in cliques {
                blocks.push((0..k).filter(|&i| c >> i & 1 == 1).collect());
            }
        } else {
            for start in 0..k {
                let mut clique = vec![start];
                for j in 0..k {
                    if clique.iter().all(|&i| orthogonal(i, j)) {
                        clique.push(j);
                    }
                }
                clique.sort_unstable();
                blocks.push(clique);
            }
        }
        let mut blocks: Vec<Vec<ElementId>> = blocks
            .into_iter()
            .map(|c| c.into_iter().map(|i| atoms[i]).collect())
            .collect();
        blocks.sort();
        blocks.dedup();
        blocks
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(x: usize) -> ElementId {
        ElementId(x)
    }

    #[test]
    fn boolean_smallest_is_two_elements() {
        let l = Lattice::boolean(["p"]).unwrap();
        assert_eq!(l.n(), 2);
        assert_eq!(l.atoms(), vec![l.top()]);
        assert_eq!(l.element_name(l.top()), "p");
        assert_eq!(l.element_name(l.bottom()), "0");
    }

    #[test]
    fn boolean_two_atoms_complements() {
        let l = Lattice::boolean(["p", "q"]).unwrap();
        assert_eq!(l.n(), 4);
        let p = l.element_by_name("p").unwrap();
        let q = l.element_by_name("q").unwrap();
        assert_eq!(l.ortho(p), q);
        assert_eq!(l.ortho(q), p);
    }

    #[test]
    fn boolean_three_atoms_matches_powerset_oracle() {
        // Oracle: elements are subsets; join = union, meet = intersection,
        // ortho = complement. The element id is the subset mask itself, so
        // assert against directly-computed masks.
        let l = Lattice::boolean(["p", "q", "r"]).unwrap();
        assert_eq!(l.n(), 8);
        let p = l.element_by_name("p").unwrap();
        let q = l.element_by_name("q").unwrap();
        let r = l.element_by_name("r").unwrap();
        let pq = l.join(p, q);
        assert_eq!(pq, id(0b011));
        assert_eq!(l.ortho(pq), r);
        let pr = l.join(p, r);
        assert_eq!(l.meet(pq, pr), p);
        assert_eq!(l.element_name(pq), "p\u{2228}q");
        assert_eq!(l.atoms(), vec![id(1), id(2), id(4)]);
        assert!(l.is_distributive().is_ok());
        assert!(l.verify_orthomodular().is_ok());
    }

    #[test]
    fn boolean_rejects_zero_and_oversized_atom_counts() {
        assert!(matches!(
            Lattice::boolean(Vec::<String>::new()),
            Err(LatticeError::BadAtomCount { got: 0, .. })
        ));
        let too_many: Vec<String> = (0..=BOOLEAN_ATOM_CAP).map(|i| format!("a{i}")).collect();
        assert!(matches!(
            Lattice::boolean(too_many),
            Err(LatticeError::BadAtomCount { .. })
        ));
    }

    #[test]
    fn meet_with_top_and_complement_join() {
        let l = Lattice::boolean(["p", "q", "r"]).unwrap();
        for x in l.elements() {
            assert_eq!(l.meet(x, l.top()), x);
            assert_eq!(l.join(x, l.ortho(x)), l.top());
            assert_eq!(l.meet(x, l.ortho(x)), l.bottom());
        }
    }

    #[test]
    fn mo1_is_the_four_element_boolean_algebra() {
        let mo1 = Lattice::mo(1).unwrap();
        assert_eq!(mo1.n(), 4);
        assert_eq!(mo1.atom_count(), 2);
        assert!(mo1.is_distributive().is_ok());
        // Canonical map onto 2^2: bottom, a, a', top.
        let b22 = Lattice::boolean(["a", "b"]).unwrap();
        let map = [b22.bottom(), id(1), id(2), b22.top()];
        for x in 0..4 {
            for y in 0..4 {
                assert_eq!(
                    mo1.leq(id(x), id(y)),
                    b22.leq(map[x], map[y]),
                    "order mismatch at {x},{y}"
                );
            }
            assert_eq!(map[mo1.ortho(id(x)).0], b22.ortho(map[x]));
        }
    }

    #[test]
    fn mo2_structure_and_incompatibility() {
        let l = Lattice::mo(2).unwrap();
        assert_eq!(l.n(), 6);
        let a = l.element_by_name("a").unwrap();
        let b = l.element_by_name("b").unwrap();
        assert_eq!(l.meet(a, b), l.bottom());
        assert_eq!(l.join(a, b), l.top());
        assert!(!l.is_compatible(a, b));
        assert!(l.is_compatible(a, l.ortho(a)));
        assert!(l.verify_orthomodular().is_ok());
        let violation = l.is_distributive().unwrap_err();
        // Spec example: (a, b, b') is a counterexample. The scan returns the
        // lexicographically first one; re-check the named triple directly.
        let bp = l.ortho(b);
        let lhs = l.join(a, l.meet(b, bp));
        let rhs = l.meet(l.join(a, b), l.join(a, bp));
        assert_eq!(lhs, a);
        assert_eq!(rhs, l.top());
        // And the returned triple really violates the law.
        let DistributivityViolation { a: x, b: y, c: z } = violation;
        assert_ne!(l.join(x, l.meet(y, z)), l.meet(l.join(x, y), l.join(x, z)));
    }

    #[test]
    fn mo_family_laws() {
        for n in 1..=8 {
            let l = Lattice::mo(n).unwrap();
            assert_eq!(l.n(), 2 * n + 2);
            assert!(l.verify_orthomodular().is_ok());
            if n >= 2 {
                assert!(l.is_distributive().is_err());
            }
            assert_eq!(l.atom_count(), 2 * n);
        }
        assert!(Lattice::mo(0).is_err());
    }

    #[test]
    fn o6_fails_orthomodularity_with_the_chain_pair() {
        let l = Lattice::o6();
        let v = l.verify_orthomodular().unwrap_err();
        assert_eq!((v.a, v.b), (id(1), id(2)));
        // Re-verify the witness: a <= b but a v (b ^ a') = a.
        assert!(l.leq(v.a, v.b));
        assert_eq!(l.join(v.a, l.meet(v.b, l.ortho(v.a))), v.a);
    }

    #[test]
    fn two_element_lattice_is_distributive() {
        let l = Lattice::boolean(["p"]).unwrap();
        assert!(l.is_distributive().is_ok());
        assert_eq!(l.atoms(), vec![l.top()]);
    }

    #[test]
    fn de_morgan_holds_exhaustively_on_fixtures() {
        for l in [
            Lattice::boolean(["p", "q", "r"]).unwrap(),
            Lattice::mo(3).unwrap(),
            Lattice::o6(),
        ] {
            for x in l.elements() {
                for y in l.elements() {
                    assert_eq!(
                        l.meet(x, y),
                        l.ortho(l.join(l.ortho(x), l.ortho(y))),
                        "De Morgan fails at {x}, {y}"
                    );
                }
            }
        }
    }

    #[test]
    fn comparable_elements_are_compatible() {
        for l in [
            Lattice::boolean(["p", "q", "r"]).unwrap(),
            Lattice::mo(4).unwrap(),
        ] {
            for x in l.elements() {
                for y in l.elements() {
                    if l.leq(x, y) {
                        assert!(l.is_compatible(x, y));
                        assert!(l.is_compatible(y, x));
                    }
                }
            }
        }
    }

    #[test]
    fn compatibility_is_symmetric_on_omls() {
        for l in [
            Lattice::boolean(["p", "q"]).unwrap(),
            Lattice::mo(3).unwrap(),
        ] {
            for x in l.elements() {
                for y in l.elements() {
                    assert_eq!(l.is_compatible(x, y), l.is_compatible(y, x));
                }
            }
        }
    }

    #[test]
    fn boolean_lattice_all_pairs_compatible() {
        let l = Lattice::boolean(["p", "q", "r"]).unwrap();
        for x in l.elements() {
            for y in l.elements() {
                assert!(l.is_compatible(x, y));
            }
        }
    }

    #[test]
    fn orthogonal_blocks_for_families() {
        let b = Lattice::boolean(["p", "q", "r"]).unwrap();
        assert_eq!(b.orthogonal_blocks(), vec![b.atoms()]);

        let mo2 = Lattice::mo(2).unwrap();
        let blocks = mo2.orthogonal_blocks();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0], vec![id(1), id(2)]);
        assert_eq!(blocks[1], vec![id(3), id(4)]);
    }

    #[test]
    fn element_expression_parsing() {
        let l = Lattice::boolean(["p", "q", "r"]).unwrap();
        assert_eq!(l.parse_element("p|q").unwrap(), id(0b011));
        assert_eq!(l.parse_element("p\u{2228}q").unwrap(), id(0b011));
        assert_eq!(l.parse_element("I").unwrap(), l.top());
        assert!(l.parse_element("nope").is_err());
    }

    #[test]
    fn lattices_are_shareable_across_threads() {
        fn assert_send_sync<T: Send + Sync>() {}
        assert_send_sync::<Lattice>();
    }

    #[test]
    fn from_order_rejects_broken_structures() {
        // Missing meet: two maximal elements under two minimal ones, no
        // bottom/top — a diamond with the middle removed.
        let r = Lattice::from_order(
            vec!["w".into(), "x".into(), "y".into(), "z".into()],
            vec![3, 2, 1, 0],
            |a, b| a == b || (a == 0 && b >= 2) || (a == 1 && b >= 2),
        );
        assert!(r.is_err());

        // Non-involutive ortho on a valid chain order.
        let r = Lattice::from_order(vec!["0".into(), "I".into()], vec![0, 1], |a, b| a <= b);
        assert!(matches!(
            r,
            Err(LatticeError::ComplementJoinFails(_))
                | Err(LatticeError::OrthoNotOrderReversing(..))
        ));
    }
}
