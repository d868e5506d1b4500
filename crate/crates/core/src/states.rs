//! Exact-rational probability measures on finite lattices.
//!
//! A `Measure` assigns each element a rational in [0,1] with value 0 at the
//! bottom, 1 at the top, and finite additivity over orthogonal pairs. On
//! powerset-backed lattices the measure is stored as atom weights and
//! evaluated on demand, which keeps dyadic refinements with millions of
//! elements cheap; everywhere else it is an explicit value table.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use thiserror::Error;

use crate::lattice::{ElementId, Lattice, TABLE_ELEMENT_CAP};
use crate::ratio::{is_probability, parse_ratio, ratio_json, RatioParseError};

/// Attempt budget for `random_state` rejection sampling.
pub const RANDOM_STATE_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("valuation has {got} entries, lattice has {expected} elements")]
    WrongLength { got: usize, expected: usize },
    #[error("value at element {0} outside [0, 1]")]
    OutOfRange(ElementId),
    #[error("bottom element must have value 0")]
    BottomNotZero,
    #[error("top element must have value 1")]
    TopNotOne,
    #[error("additivity fails on the orthogonal pair ({a}, {b})")]
    Additivity { a: ElementId, b: ElementId },
    #[error("atom weights: {got} given, lattice has {expected} atoms")]
    WrongAtomCount { got: usize, expected: usize },
    #[error("negative atom weight at position {0}")]
    NegativeWeight(usize),
    #[error("atom weights sum to {sum}, expected 1")]
    WeightSumNotOne { sum: String },
    #[error("element {0} is not a join of orthogonal atoms within one block")]
    Unrepresentable(ElementId),
    #[error("explicit valuation unsupported above {cap} elements (lattice has {got})")]
    TooLarge { got: usize, cap: usize },
    #[error("unknown atom label `{0}`")]
    UnknownAtom(String),
    #[error("duplicate atom label `{0}`")]
    DuplicateAtomLabel(String),
    #[error("no weight given for atom `{0}`")]
    MissingAtom(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MeasureFileError {
    #[error("line {line}: expected `<atom> = <num>/<den>`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: {source}")]
    BadRational {
        line: usize,
        source: RatioParseError,
    },
}

#[derive(Clone, Debug)]
enum Repr {
    Table(Vec<BigRational>),
    AtomWeights(Vec<BigRational>),
}

/// A validated probability measure on a specific lattice.
#[derive(Clone, Debug)]
pub struct Measure {
    repr: Repr,
}

impl Measure {
    /// The value at an element. For atom-weight measures the element id is
    /// the atom mask and the value is the weight sum over its bits.
    pub fn value(&self, x: ElementId) -> BigRational {
        match &self.repr {
            Repr::Table(values) => values[x.0].clone(),
            Repr::AtomWeights(weights) => {
                let mut acc = BigRational::zero();
                let mut mask = x.0;
                while mask != 0 {
                    let i = mask.trailing_zeros() as usize;
                    acc += &weights[i];
                    mask &= mask - 1;
                }
                acc
            }
        }
    }

    /// Atom weights in lattice atom order.
    pub fn atom_weights(&self, lattice: &Lattice) -> Vec<BigRational> {
        match &self.repr {
            Repr::AtomWeights(weights) => weights.clone(),
            Repr::Table(_) => lattice.atoms().into_iter().map(|a| self.value(a)).collect(),
        }
    }
}

fn check_orthogonal_additivity(
    lattice: &Lattice,
    value: &dyn Fn(ElementId) -> BigRational,
) -> Result<(), MeasureError> {
    let n = lattice.n();
    for a in 0..n {
        let ea = ElementId(a);
        let va = value(ea);
        for b in a..n {
            let eb = ElementId(b);
            if !lattice.leq(ea, lattice.ortho(eb)) {
                continue;
            }
            if value(lattice.join(ea, eb)) != &va + value(eb) {
                return Err(MeasureError::Additivity { a: ea, b: eb });
            }
        }
    }
    Ok(())
}

/// Validates a raw valuation: every value in [0,1], 0 at bottom, 1 at top,
/// and exact additivity over every orthogonal pair. The first failing
/// orthogonal pair is reported. Acceptance does not depend on scan order;
/// only the named pair does.
pub fn validate_measure(lattice: &Lattice, raw: Vec<BigRational>) -> Result<Measure, MeasureError> {
    let n = lattice.n();
    if n > TABLE_ELEMENT_CAP {
        return Err(MeasureError::TooLarge {
            got: n,
            cap: TABLE_ELEMENT_CAP,
        });
    }
    if raw.len() != n {
        return Err(MeasureError::WrongLength {
            got: raw.len(),
            expected: n,
        });
    }
    for (i, v) in raw.iter().enumerate() {
        if !is_probability(v) {
            return Err(MeasureError::OutOfRange(ElementId(i)));
        }
    }
    if !raw[lattice.bottom().0].is_zero() {
        return Err(MeasureError::BottomNotZero);
    }
    if !raw[lattice.top().0].is_one() {
        return Err(MeasureError::TopNotOne);
    }
    check_orthogonal_additivity(lattice, &|x| raw[x.0].clone())?;
    Ok(Measure {
        repr: Repr::Table(raw),
    })
}

/// Extends atom weights to a full measure.
///
/// On powerset-backed lattices the weights must be nonnegative and sum to 1;
/// the measure is additive by construction. On table lattices each element
/// is evaluated through a block representation (the sum over a maximal
/// orthogonal atom set below it whose join is the element) and the result is
/// validated exhaustively, so per-block sum constraints surface as
/// additivity violations.
pub fn measure_from_atom_weights(
    lattice: &Lattice,
    weights: Vec<BigRational>,
) -> Result<Measure, MeasureError> {
    let atoms = lattice.atoms();
    if weights.len() != atoms.len() {
        return Err(MeasureError::WrongAtomCount {
            got: weights.len(),
            expected: atoms.len(),
        });
    }
    for (i, w) in weights.iter().enumerate() {
        if w < &BigRational::zero() {
            return Err(MeasureError::NegativeWeight(i));
        }
    }
    if lattice.is_powerset() {
        let sum: BigRational = weights.iter().cloned().sum();
        if !sum.is_one() {
            return Err(MeasureError::WeightSumNotOne {
                sum: crate::ratio::format_ratio(&sum),
            });
        }
        let measure = Measure {
            repr: Repr::AtomWeights(weights),
        };
        if lattice.n() <= TABLE_ELEMENT_CAP {
            // Desk-scale: run the full scan rather than trusting structure.
            check_orthogonal_additivity(lattice, &|x| measure.value(x))?;
        }
        return Ok(measure);
    }

    let weight_of = |atom: ElementId| -> &BigRational {
        let i = atoms.iter().position(|&a| a == atom).unwrap();
        &weights[i]
    };
    let blocks = lattice.orthogonal_blocks();
    let mut table = Vec::with_capacity(lattice.n());
    for x in lattice.elements() {
        if x == lattice.bottom() {
            table.push(BigRational::zero());
            continue;
        }
        let mut value = None;
        for block in &blocks {
            let below: Vec<ElementId> = block
                .iter()
                .copied()
                .filter(|&a| lattice.leq(a, x))
                .collect();
            let join = below
                .iter()
                .fold(lattice.bottom(), |acc, &a| lattice.join(acc, a));
            if join == x {
                value = Some(below.iter().map(|&a| weight_of(a)).cloned().sum());
                break;
            }
        }
        match value {
            Some(v) => table.push(v),
            None => return Err(MeasureError::Unrepresentable(x)),
        }
    }
    validate_measure(lattice, table)
}

/// Parses measure files: `<atom> = <num>/<den>` per line, `#` comments.
pub fn parse_measure_file(text: &str) -> Result<Vec<(String, BigRational)>, MeasureFileError> {
    let mut entries = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (label, value) = content
            .split_once('=')
            .ok_or_else(|| MeasureFileError::Syntax {
                line,
                text: content.to_string(),
            })?;
        let value =
            parse_ratio(value).map_err(|source| MeasureFileError::BadRational { line, source })?;
        entries.push((label.trim().to_string(), value));
    }
    Ok(entries)
}

/// Builds a measure from labeled atom weights (the measure-file payload).
/// Every atom must be covered exactly once.
pub fn measure_from_labeled_weights(
    lattice: &Lattice,
    entries: &[(String, BigRational)],
) -> Result<Measure, MeasureError> {
    let atoms = lattice.atoms();
    let mut by_label: BTreeMap<String, BigRational> = BTreeMap::new();
    for (label, value) in entries {
        if by_label.insert(label.clone(), value.clone()).is_some() {
            return Err(MeasureError::DuplicateAtomLabel(label.clone()));
        }
    }
    let mut weights = Vec::with_capacity(atoms.len());
    let mut names: Vec<String> = Vec::with_capacity(atoms.len());
    for &atom in &atoms {
        names.push(lattice.element_name(atom));
    }
    for label in by_label.keys() {
        if !names.iter().any(|n| n == label) {
            return Err(MeasureError::UnknownAtom(label.clone()));
        }
    }
    for name in &names {
        match by_label.get(name) {
            Some(v) => weights.push(v.clone()),
            None => return Err(MeasureError::MissingAtom(name.clone())),
        }
    }
    measure_from_atom_weights(lattice, weights)
}

/// Samples a faithful measure, deterministic per seed.
///
/// Each maximal orthogonal atom block receives a positive rational
/// distribution; atoms shared between blocks constrain later blocks, and
/// inconsistent draws are rejected and retried up to
/// `RANDOM_STATE_ATTEMPTS` times. Returns `None` when the budget runs out.
pub fn random_state(lattice: &Lattice, seed: u64, denominator_bound: u32) -> Option<Measure> {
    let bound = denominator_bound.max(2);
    let atoms = lattice.atoms();
    if atoms.is_empty() {
        return None;
    }
    let blocks = lattice.orthogonal_blocks();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    'attempt: for _ in 0..RANDOM_STATE_ATTEMPTS {
        let mut assigned: BTreeMap<ElementId, BigRational> = BTreeMap::new();
        for block in &blocks {
            let mut remaining = BigRational::one();
            let mut free: Vec<ElementId> = Vec::new();
            for &atom in block {
                match assigned.get(&atom) {
                    Some(w) => remaining -= w,
                    None => free.push(atom),
                }
            }
            if free.is_empty() {
                if remaining.is_zero() {
                    continue;
                }
                continue 'attempt;
            }
            if remaining <= BigRational::zero() {
                continue 'attempt;
            }
            let draws: Vec<u64> = free
                .iter()
                .map(|_| rng.random_range(1..=bound as u64))
                .collect();
            let total: u64 = draws.iter().sum();
            for (&atom, &draw) in free.iter().zip(&draws) {
                let share = &remaining * BigRational::new(draw.into(), total.into());
                assigned.insert(atom, share);
            }
        }
        let weights: Vec<BigRational> = atoms
            .iter()
            .map(|a| assigned.get(a).cloned().unwrap_or_else(BigRational::zero))
            .collect();
        let Ok(measure) = measure_from_atom_weights(lattice, weights) else {
            continue 'attempt;
        };
        if is_faithful(lattice, &measure) {
            return Some(measure);
        }
    }
    None
}

/// First nonzero-measure-free element: a witness that faithfulness fails.
pub fn non_faithful_witness(lattice: &Lattice, measure: &Measure) -> Option<ElementId> {
    lattice
        .elements()
        .find(|&x| x != lattice.bottom() && measure.value(x).is_zero())
}

/// A measure is faithful when only the bottom element has value 0.
pub fn is_faithful(lattice: &Lattice, measure: &Measure) -> bool {
    non_faithful_witness(lattice, measure).is_none()
}

/// All measure-theoretic atoms: elements of positive value below which every
/// element carries value 0 or the full value. Ascending index order.
pub fn phi_atoms(lattice: &Lattice, measure: &Measure) -> Vec<ElementId> {
    lattice
        .elements()
        .filter(|&a| {
            let va = measure.value(a);
            if va.is_zero() {
                return false;
            }
            lattice.elements().all(|b| {
                if !lattice.leq(b, a) {
                    return true;
                }
                let vb = measure.value(b);
                vb.is_zero() || vb == va
            })
        })
        .collect()
}

/// Verdict of the two verbatim atomicity definitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Atomicity {
    PurelyAtomic,
    PurelyNonatomic,
    Neither,
}

impl Atomicity {
    pub fn as_str(self) -> &'static str {
        match self {
            Atomicity::PurelyAtomic => "purely-atomic",
            Atomicity::PurelyNonatomic => "purely-nonatomic",
            Atomicity::Neither => "neither",
        }
    }
}

/// Applies both definitions by exhaustive scan: purely atomic iff every
/// positive element dominates a phi-atom, purely nonatomic iff every
/// positive element strictly dominates an element of strictly intermediate
/// value. On finite lattices the first always holds.
pub fn classify_atomicity(lattice: &Lattice, measure: &Measure) -> Atomicity {
    let phi = phi_atoms(lattice, measure);
    let positives: Vec<ElementId> = lattice
        .elements()
        .filter(|&x| !measure.value(x).is_zero())
        .collect();
    let atomic = positives
        .iter()
        .all(|&x| phi.iter().any(|&b| lattice.leq(b, x)));
    if atomic {
        return Atomicity::PurelyAtomic;
    }
    let nonatomic = positives.iter().all(|&x| {
        let vx = measure.value(x);
        lattice.elements().any(|b| {
            b != x
                && lattice.leq(b, x)
                && measure.value(b) > BigRational::zero()
                && measure.value(b) < vx
        })
    });
    if nonatomic {
        Atomicity::PurelyNonatomic
    } else {
        Atomicity::Neither
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QDecomposeError {
    #[error("element {0} is not a phi-atom")]
    NotPhiAtom(ElementId),
    #[error("lattice too large for q-decomposition tables ({got} > {cap})")]
    TooLarge { got: usize, cap: usize },
    #[error("first component is not a measure on this lattice: {0}")]
    Phi1NotMeasure(MeasureError),
    #[error("second component is not a measure on this lattice: {0}")]
    Phi2NotMeasure(MeasureError),
}

/// The convex split of a measure at a phi-atom `q`:
/// `alpha * phi1 + (1 - alpha) * phi2` reconstructs the original measure
/// exactly, `phi1` is two-valued, and in the degenerate case `alpha = 1`
/// there is no second component.
#[derive(Debug, Clone)]
pub struct QDecomposition {
    pub q: ElementId,
    pub alpha: BigRational,
    pub phi1: Measure,
    pub phi2: Option<Measure>,
}

/// Splits `measure` at the phi-atom `q` via the cut tables
/// `phi1'(a) = phi(a ^ q)` and `phi2'(a) = phi(a ^ (a ^ q)')`, normalized
/// by `alpha = phi(q)` and `1 - alpha`.
///
/// On Boolean lattices both components are always measures. On general
/// orthomodular lattices the cut tables can fail additivity (a two-valued
/// state concentrated over one atom need not exist there); that failure is
/// reported, not papered over.
pub fn q_decompose(
    lattice: &Lattice,
    measure: &Measure,
    q: ElementId,
) -> Result<QDecomposition, QDecomposeError> {
    let n = lattice.n();
    if n > TABLE_ELEMENT_CAP {
        return Err(QDecomposeError::TooLarge {
            got: n,
            cap: TABLE_ELEMENT_CAP,
        });
    }
    if !phi_atoms(lattice, measure).contains(&q) {
        return Err(QDecomposeError::NotPhiAtom(q));
    }
    let alpha = measure.value(q);
    let mut phi1_raw = Vec::with_capacity(n);
    let mut phi2_raw = Vec::with_capacity(n);
    for x in lattice.elements() {
        let cut = lattice.meet(x, q);
        phi1_raw.push(measure.value(cut));
        phi2_raw.push(measure.value(lattice.meet(x, lattice.ortho(cut))));
    }
    if alpha.is_one() {
        let phi1 = validate_measure(lattice, phi1_raw).map_err(QDecomposeError::Phi1NotMeasure)?;
        return Ok(QDecomposition {
            q,
            alpha,
            phi1,
            phi2: None,
        });
    }
    let rest = BigRational::one() - &alpha;
    let phi1_scaled: Vec<BigRational> = phi1_raw.into_iter().map(|v| v / &alpha).collect();
    let phi2_scaled: Vec<BigRational> = phi2_raw.into_iter().map(|v| v / &rest).collect();
    let phi1 = validate_measure(lattice, phi1_scaled).map_err(QDecomposeError::Phi1NotMeasure)?;
    let phi2 = validate_measure(lattice, phi2_scaled).map_err(QDecomposeError::Phi2NotMeasure)?;
    Ok(QDecomposition {
        q,
        alpha,
        phi1,
        phi2: Some(phi2),
    })
}

/// Full value table as JSON: element label -> {"num", "den"}.
/// Desk-scale lattices only.
pub fn measure_json(lattice: &Lattice, measure: &Measure) -> Value {
    let mut map = serde_json::Map::new();
    for x in lattice.elements() {
        map.insert(lattice.element_name(x), ratio_json(&measure.value(x)));
    }
    Value::Object(map)
}

/// Atom weights as JSON: atom label -> {"num", "den"}.
pub fn atom_weights_json(lattice: &Lattice, measure: &Measure) -> Value {
    let mut map = serde_json::Map::new();
    for atom in lattice.atoms() {
        map.insert(lattice.element_name(atom), ratio_json(&measure.value(atom)));
    }
    Value::Object(map)
}

pub fn uniform_weights(count: usize) -> Vec<BigRational> {
    let share = BigRational::new(1.into(), (count as i64).into());
    vec![share; count]
}
