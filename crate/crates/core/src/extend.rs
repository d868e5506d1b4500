//! Measure-preserving refinement of Boolean spaces.
//!
//! An unexplained correlation in a Boolean space may become explainable
//! after splitting atoms into finer events: the candidate causes the source
//! lattice lacks can exist in the refinement. `dyadic_refine` splits every
//! atom into 2^k parts (uniform by default, custom positive weights on
//! request), `verify_embedding` re-checks the resulting map exhaustively,
//! and `explain_in_extension` reruns the common-cause search across the
//! refined space. All outputs are empirical: a hit shows a hidden cause at
//! that depth, a miss decides nothing.

use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::causality::{
    check_common_cause, find_common_causes, CommonCauseCertificate, CorrelationWitness,
};
use crate::lattice::{ElementId, Lattice, TABLE_ELEMENT_CAP};
use crate::ratio::{parse_ratio, RatioParseError};
use crate::states::{measure_from_atom_weights, Measure, MeasureError};

/// Depth cap for refinement.
pub const MAX_REFINE_DEPTH: u32 = 3;
/// Total refined atom cap: 24 atoms is 2^24 elements, the largest target
/// the embedding checks ever need.
pub const MAX_REFINED_ATOMS: usize = 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtendError {
    #[error("source lattice is not Boolean")]
    SourceNotBoolean,
    #[error("refinement depth {got} exceeds the cap {cap}")]
    DepthTooLarge { got: u32, cap: u32 },
    #[error("refinement would have {got} atoms, above the {cap}-atom cap")]
    TooManyAtoms { got: usize, cap: usize },
    #[error("refined space has {elements} elements; the exhaustive search cap is {cap}")]
    SearchSpaceTooLarge { elements: usize, cap: usize },
    #[error("split table: unknown atom `{0}`")]
    UnknownAtom(String),
    #[error("split table: atom `{atom}` has {got} parts, expected {expected}")]
    WrongPartCount {
        atom: String,
        got: usize,
        expected: usize,
    },
    #[error("split table: parts for `{atom}` sum to {got}, expected the atom weight {expected}")]
    PartSumMismatch {
        atom: String,
        got: String,
        expected: String,
    },
    #[error("split table: part {index} for positive-weight atom `{atom}` is not positive")]
    PartNotPositive { atom: String, index: usize },
    #[error("split table: zero-weight atom `{atom}` must have all-zero parts")]
    PartOfZeroAtom { atom: String },
    #[error("the pair is not positively correlated in the source")]
    PairNotCorrelated,
    #[error("the pair already has a nontrivial common cause in the source (element {0})")]
    PairAlreadyExplained(ElementId),
    #[error("refined measure rejected: {0}")]
    RefinedMeasure(MeasureError),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SplitTableError {
    #[error("line {line}: expected `<atom>: <rational> <rational> ...`")]
    Syntax { line: usize },
    #[error("line {line}: {source}")]
    BadRational {
        line: usize,
        source: RatioParseError,
    },
    #[error("line {line}: duplicate atom `{atom}`")]
    DuplicateAtom { line: usize, atom: String },
}

/// Optional non-uniform split weights: atom label -> part weights summing to
/// the atom's measure. Atoms left out split uniformly.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SplitTable {
    entries: Vec<(String, Vec<BigRational>)>,
}

impl SplitTable {
    pub fn get(&self, atom: &str) -> Option<&[BigRational]> {
        self.entries
            .iter()
            .find(|(label, _)| label == atom)
            .map(|(_, parts)| parts.as_slice())
    }

    pub fn atoms(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(label, _)| label.as_str())
    }
}

/// Parses split-weight tables: `<atom>: <rational> <rational> ...` per
/// line, `#` comments.
pub fn parse_split_table(text: &str) -> Result<SplitTable, SplitTableError> {
    let mut entries: Vec<(String, Vec<BigRational>)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (label, rest) = content
            .split_once(':')
            .ok_or(SplitTableError::Syntax { line })?;
        let label = label.trim().to_string();
        if entries.iter().any(|(existing, _)| *existing == label) {
            return Err(SplitTableError::DuplicateAtom { line, atom: label });
        }
        let parts: Result<Vec<BigRational>, _> = rest
            .split_whitespace()
            .map(|tok| {
                parse_ratio(tok).map_err(|source| SplitTableError::BadRational { line, source })
            })
            .collect();
        let parts = parts?;
        if parts.is_empty() {
            return Err(SplitTableError::Syntax { line });
        }
        entries.push((label, parts));
    }
    Ok(SplitTable { entries })
}

/// An injective ortholattice homomorphism together with its endpoints.
/// `map[x]` is the image of source element `x`.
#[derive(Debug, Clone)]
pub struct Embedding {
    source: Lattice,
    target: Lattice,
    map: Vec<ElementId>,
}

impl Embedding {
    pub fn source(&self) -> &Lattice {
        &self.source
    }

    pub fn target(&self) -> &Lattice {
        &self.target
    }

    pub fn apply(&self, x: ElementId) -> ElementId {
        self.map[x.0]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmbeddingViolation {
    #[error("not injective: {0} and {1} share an image")]
    NotInjective(ElementId, ElementId),
    #[error("bottom is not preserved")]
    Bottom,
    #[error("top is not preserved")]
    Top,
    #[error("orthocomplement not preserved at {0}")]
    Ortho(ElementId),
    #[error("meet not preserved at ({0}, {1})")]
    Meet(ElementId, ElementId),
    #[error("join not preserved at ({0}, {1})")]
    Join(ElementId, ElementId),
    #[error("order not reflected at ({0}, {1})")]
    Order(ElementId, ElementId),
    #[error("measure not preserved at {0}")]
    Measure(ElementId),
}

/// Exhaustively checks injectivity, the homomorphism laws on every source
/// pair, order in both directions, and exact measure preservation.
pub fn verify_embedding(
    embedding: &Embedding,
    source_measure: &Measure,
    target_measure: &Measure,
) -> Result<(), EmbeddingViolation> {
    let src = &embedding.source;
    let tgt = &embedding.target;
    let h = |x: ElementId| embedding.apply(x);

    for x in src.elements() {
        for y in src.elements() {
            if x.0 < y.0 && h(x) == h(y) {
                return Err(EmbeddingViolation::NotInjective(x, y));
            }
        }
    }
    if h(src.bottom()) != tgt.bottom() {
        return Err(EmbeddingViolation::Bottom);
    }
    if h(src.top()) != tgt.top() {
        return Err(EmbeddingViolation::Top);
    }
    for x in src.elements() {
        if h(src.ortho(x)) != tgt.ortho(h(x)) {
            return Err(EmbeddingViolation::Ortho(x));
        }
    }
    for x in src.elements() {
        for y in src.elements() {
            if h(src.meet(x, y)) != tgt.meet(h(x), h(y)) {
                return Err(EmbeddingViolation::Meet(x, y));
            }
            if h(src.join(x, y)) != tgt.join(h(x), h(y)) {
                return Err(EmbeddingViolation::Join(x, y));
            }
            if src.leq(x, y) != tgt.leq(h(x), h(y)) {
                return Err(EmbeddingViolation::Order(x, y));
            }
        }
    }
    for x in src.elements() {
        if target_measure.value(h(x)) != source_measure.value(x) {
            return Err(EmbeddingViolation::Measure(x));
        }
    }
    Ok(())
}

/// A refinement: the embedding plus the refined measure on its target.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub embedding: Embedding,
    pub refined: Measure,
}

fn require_boolean(lattice: &Lattice) -> Result<(), ExtendError> {
    if lattice.is_powerset() || lattice.is_distributive().is_ok() {
        Ok(())
    } else {
        Err(ExtendError::SourceNotBoolean)
    }
}

/// Splits every atom of a Boolean space into 2^k parts.
///
/// Uniform by default; a split table overrides individual atoms with custom
/// positive part weights (zero-weight atoms take all-zero parts). `k = 0`
/// yields the identity embedding. The refined measure is faithful exactly
/// when the source measure is.
pub fn dyadic_refine(
    lattice: &Lattice,
    measure: &Measure,
    k: u32,
    splits: Option<&SplitTable>,
) -> Result<Refinement, ExtendError> {
    require_boolean(lattice)?;
    if k > MAX_REFINE_DEPTH {
        return Err(ExtendError::DepthTooLarge {
            got: k,
            cap: MAX_REFINE_DEPTH,
        });
    }
    if let Some(table) = splits {
        for atom in table.atoms() {
            if lattice
                .atoms()
                .iter()
                .all(|&a| lattice.element_name(a) != atom)
            {
                return Err(ExtendError::UnknownAtom(atom.to_string()));
            }
        }
    }
    if k == 0 {
        return Ok(Refinement {
            embedding: Embedding {
                source: lattice.clone(),
                target: lattice.clone(),
                map: lattice.elements().collect(),
            },
            refined: measure.clone(),
        });
    }

    let atoms = lattice.atoms();
    let parts_per_atom = 1usize << k;
    let refined_atoms = atoms.len() * parts_per_atom;
    if refined_atoms > MAX_REFINED_ATOMS {
        return Err(ExtendError::TooManyAtoms {
            got: refined_atoms,
            cap: MAX_REFINED_ATOMS,
        });
    }

    let mut part_names = Vec::with_capacity(refined_atoms);
    let mut part_weights = Vec::with_capacity(refined_atoms);
    let uniform_denominator = BigRational::new((parts_per_atom as i64).into(), 1.into());
    for &atom in &atoms {
        let name = lattice.element_name(atom);
        let weight = measure.value(atom);
        let custom = splits.and_then(|t| t.get(&name));
        match custom {
            Some(parts) => {
                if parts.len() != parts_per_atom {
                    return Err(ExtendError::WrongPartCount {
                        atom: name,
                        got: parts.len(),
                        expected: parts_per_atom,
                    });
                }
                let sum: BigRational = parts.iter().cloned().sum();
                if sum != weight {
                    return Err(ExtendError::PartSumMismatch {
                        atom: name,
                        got: crate::ratio::format_ratio(&sum),
                        expected: crate::ratio::format_ratio(&weight),
                    });
                }
                for (i, part) in parts.iter().enumerate() {
                    if weight.is_zero() {
                        if !part.is_zero() {
                            return Err(ExtendError::PartOfZeroAtom { atom: name });
                        }
                    } else if part <= &BigRational::zero() {
                        return Err(ExtendError::PartNotPositive {
                            atom: name,
                            index: i,
                        });
                    }
                }
                part_weights.extend(parts.iter().cloned());
            }
            None => {
                let share = weight / &uniform_denominator;
                part_weights.extend(std::iter::repeat_n(share, parts_per_atom));
            }
        }
        for i in 0..parts_per_atom {
            part_names.push(format!("{name}_{i}"));
        }
    }

    let target = Lattice::powerset_unchecked(part_names);
    let refined =
        measure_from_atom_weights(&target, part_weights).map_err(ExtendError::RefinedMeasure)?;

    // h sends an element to the union of the parts of its atoms. Source
    // elements are joins of their atoms (Boolean), so this determines h.
    let atom_images: Vec<usize> = (0..atoms.len())
        .map(|i| {
            let lo = i * parts_per_atom;
            ((1usize << parts_per_atom) - 1) << lo
        })
        .collect();
    let map: Vec<ElementId> = lattice
        .elements()
        .map(|x| {
            let mut mask = 0usize;
            for (i, &atom) in atoms.iter().enumerate() {
                if lattice.leq(atom, x) {
                    mask |= atom_images[i];
                }
            }
            ElementId(mask)
        })
        .collect();

    Ok(Refinement {
        embedding: Embedding {
            source: lattice.clone(),
            target,
            map,
        },
        refined,
    })
}

/// Outcome of a hidden-cause search in a refinement.
#[derive(Debug, Clone)]
pub struct ExtensionOutcome {
    pub refinement: Refinement,
    pub refined_a: ElementId,
    pub refined_b: ElementId,
    /// First nontrivial certificate in index order, if any.
    pub certificate: Option<CommonCauseCertificate>,
}

/// Maps an unexplained correlated pair through a depth-k refinement and
/// reruns the exhaustive nontrivial common-cause search there.
pub fn explain_in_extension(
    lattice: &Lattice,
    measure: &Measure,
    witness: &CorrelationWitness,
    k: u32,
    splits: Option<&SplitTable>,
) -> Result<ExtensionOutcome, ExtendError> {
    let (a, b) = (witness.a, witness.b);
    if !lattice.is_compatible(a, b)
        || measure.value(lattice.meet(a, b)) <= measure.value(a) * measure.value(b)
    {
        return Err(ExtendError::PairNotCorrelated);
    }
    if let Some(cert) = lattice
        .elements()
        .find(|&c| c != a && c != b && check_common_cause(lattice, measure, a, b, c).is_ok())
    {
        return Err(ExtendError::PairAlreadyExplained(cert));
    }
    let refinement = dyadic_refine(lattice, measure, k, splits)?;
    let target_n = refinement.embedding.target().n();
    if target_n > TABLE_ELEMENT_CAP {
        return Err(ExtendError::SearchSpaceTooLarge {
            elements: target_n,
            cap: TABLE_ELEMENT_CAP,
        });
    }
    let ha = refinement.embedding.apply(a);
    let hb = refinement.embedding.apply(b);
    let certificate = find_common_causes(
        refinement.embedding.target(),
        &refinement.refined,
        ha,
        hb,
        true,
    )
    .into_iter()
    .next();
    Ok(ExtensionOutcome {
        refinement,
        refined_a: ha,
        refined_b: hb,
        certificate,
    })
}
