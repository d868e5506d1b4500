//! Correlation detection and Reichenbachian common causes.
//!
//! A pair of distinct compatible elements is (positively) correlated when
//! `phi(A ^ B) > phi(A) phi(B)`. A common cause for the correlation is an
//! element compatible with both, with probability strictly between 0 and 1,
//! that screens the correlation off behind itself and its complement
//! (two exact conditional-independence equalities) while being positively
//! statistically relevant to each side (two strict inequalities).
//!
//! Everything here is an exhaustive scan over the lattice: at desk scale
//! correctness as an oracle beats cleverness. Incompatible pairs are never
//! considered correlated, and common causes incompatible with the correlata
//! are never admitted.

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use thiserror::Error;

use crate::lattice::{ElementId, Lattice};
use crate::ratio::ratio_json;
use crate::states::Measure;

/// A positively correlated pair: `lhs = phi(a ^ b)` strictly exceeds
/// `rhs = phi(a) phi(b)`; `a < b` by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationWitness {
    pub a: ElementId,
    pub b: ElementId,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl CorrelationWitness {
    /// The correlation gap `phi(a ^ b) - phi(a) phi(b)`.
    pub fn gap(&self) -> BigRational {
        &self.lhs - &self.rhs
    }
}

/// A negatively correlated pair, reported for diagnostics only; never
/// part of the closedness verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Anticorrelation {
    pub a: ElementId,
    pub b: ElementId,
    pub lhs: BigRational,
    pub rhs: BigRational,
}

/// One screening-off or relevance condition: the two sides of the equality
/// (for the first pair) or of the strict inequality (for the second).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccCondition {
    pub lhs: BigRational,
    pub rhs: BigRational,
}

/// A verified common cause: the recorded facts re-verify against the
/// lattice and measure via `reverify`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommonCauseCertificate {
    pub c: ElementId,
    pub phi_c: BigRational,
    pub compatible_with_a: bool,
    pub compatible_with_b: bool,
    /// Screening off behind c: equality.
    pub occ1: OccCondition,
    /// Screening off behind c': equality.
    pub occ2: OccCondition,
    /// Relevance to a: strict inequality lhs > rhs.
    pub occ3: OccCondition,
    /// Relevance to b: strict inequality lhs > rhs.
    pub occ4: OccCondition,
    /// c differs from both correlata.
    pub nontrivial: bool,
}

/// First violated condition, in evaluation order.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommonCauseFailure {
    #[error("candidate is incompatible with the first correlatum")]
    IncompatibleWithA,
    #[error("candidate is incompatible with the second correlatum")]
    IncompatibleWithB,
    #[error("phi(c) must lie strictly between 0 and 1")]
    ProbabilityNotStrict { phi_c: BigRational },
    #[error("screening-off behind c fails")]
    Occ1(OccCondition),
    #[error("screening-off behind c' fails")]
    Occ2(OccCondition),
    #[error("relevance to the first correlatum fails")]
    Occ3(OccCondition),
    #[error("relevance to the second correlatum fails")]
    Occ4(OccCondition),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorrelationFromAtomsError {
    #[error("{0} is not an atom")]
    NotAtom(ElementId),
    #[error("the two atoms must be distinct")]
    SameAtom,
    #[error("phi(p v q) = 1: the construction yields no correlation")]
    JoinHasFullMeasure,
    #[error("phi(p) = 0: the construction yields no strict correlation")]
    AtomHasZeroMeasure,
}

/// Closedness verdict. `NotClosed` carries the first correlated pair (in
/// scan order) whose exhaustive nontrivial search came up empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Closedness {
    Closed,
    NotClosed { witness: CorrelationWitness },
}

impl Closedness {
    pub fn is_closed(&self) -> bool {
        matches!(self, Closedness::Closed)
    }
}

fn correlation_sides(
    lattice: &Lattice,
    measure: &Measure,
    a: ElementId,
    b: ElementId,
) -> (BigRational, BigRational) {
    let lhs = measure.value(lattice.meet(a, b));
    let rhs = measure.value(a) * measure.value(b);
    (lhs, rhs)
}

/// All positively correlated pairs of distinct compatible elements, each
/// listed once with `a < b` by index.
pub fn correlated_pairs(lattice: &Lattice, measure: &Measure) -> Vec<CorrelationWitness> {
    let mut out = Vec::new();
    let n = lattice.n();
    for a in 0..n {
        let ea = ElementId(a);
        for b in a + 1..n {
            let eb = ElementId(b);
            if !lattice.is_compatible(ea, eb) {
                continue;
            }
            let (lhs, rhs) = correlation_sides(lattice, measure, ea, eb);
            if lhs > rhs {
                out.push(CorrelationWitness {
                    a: ea,
                    b: eb,
                    lhs,
                    rhs,
                });
            }
        }
    }
    out
}

/// Diagnostic listing of negatively correlated compatible pairs.
pub fn anticorrelated_pairs(lattice: &Lattice, measure: &Measure) -> Vec<Anticorrelation> {
    let mut out = Vec::new();
    let n = lattice.n();
    for a in 0..n {
        let ea = ElementId(a);
        for b in a + 1..n {
            let eb = ElementId(b);
            if !lattice.is_compatible(ea, eb) {
                continue;
            }
            let (lhs, rhs) = correlation_sides(lattice, measure, ea, eb);
            if lhs < rhs {
                out.push(Anticorrelation {
                    a: ea,
                    b: eb,
                    lhs,
                    rhs,
                });
            }
        }
    }
    out
}

/// Checks the four common-cause conditions for candidate `c`, stopping at
/// the first violation: compatibility with each correlatum, the strict
/// probability gate, the two screening-off equalities, the two relevance
/// inequalities.
pub fn check_common_cause(
    lattice: &Lattice,
    measure: &Measure,
    a: ElementId,
    b: ElementId,
    c: ElementId,
) -> Result<CommonCauseCertificate, CommonCauseFailure> {
    if !lattice.is_compatible(c, a) {
        return Err(CommonCauseFailure::IncompatibleWithA);
    }
    if !lattice.is_compatible(c, b) {
        return Err(CommonCauseFailure::IncompatibleWithB);
    }
    let phi_c = measure.value(c);
    if phi_c <= BigRational::zero() || phi_c >= BigRational::one() {
        return Err(CommonCauseFailure::ProbabilityNotStrict { phi_c });
    }
    let cc = lattice.ortho(c);
    // phi(c') = 1 - phi(c) by additivity, so both divisors are nonzero.
    let phi_cc = measure.value(cc);
    debug_assert_eq!(&phi_c + &phi_cc, BigRational::one());

    let ab = lattice.meet(a, b);
    let cond = |side: ElementId, given: ElementId, phi_given: &BigRational| {
        measure.value(lattice.meet(side, given)) / phi_given
    };

    // occ1: P(ab | c) = P(a | c) P(b | c).
    let occ1 = OccCondition {
        lhs: cond(ab, c, &phi_c),
        rhs: cond(a, c, &phi_c) * cond(b, c, &phi_c),
    };
    if occ1.lhs != occ1.rhs {
        return Err(CommonCauseFailure::Occ1(occ1));
    }
    // occ2: P(ab | c') = P(a | c') P(b | c').
    let occ2 = OccCondition {
        lhs: cond(ab, cc, &phi_cc),
        rhs: cond(a, cc, &phi_cc) * cond(b, cc, &phi_cc),
    };
    if occ2.lhs != occ2.rhs {
        return Err(CommonCauseFailure::Occ2(occ2));
    }
    // occ3: P(a | c) > P(a | c').
    let occ3 = OccCondition {
        lhs: cond(a, c, &phi_c),
        rhs: cond(a, cc, &phi_cc),
    };
    if occ3.lhs <= occ3.rhs {
        return Err(CommonCauseFailure::Occ3(occ3));
    }
    // occ4: P(b | c) > P(b | c').
    let occ4 = OccCondition {
        lhs: cond(b, c, &phi_c),
        rhs: cond(b, cc, &phi_cc),
    };
    if occ4.lhs <= occ4.rhs {
        return Err(CommonCauseFailure::Occ4(occ4));
    }

    Ok(CommonCauseCertificate {
        c,
        phi_c,
        compatible_with_a: true,
        compatible_with_b: true,
        occ1,
        occ2,
        occ3,
        occ4,
        nontrivial: c != a && c != b,
    })
}

impl CommonCauseCertificate {
    /// Recomputes every recorded fact from scratch and compares. A forged
    /// or stale certificate fails here.
    pub fn reverify(
        &self,
        lattice: &Lattice,
        measure: &Measure,
        a: ElementId,
        b: ElementId,
    ) -> bool {
        match check_common_cause(lattice, measure, a, b, self.c) {
            Ok(fresh) => fresh == *self,
            Err(_) => false,
        }
    }
}

/// Exhaustive scan over every lattice element; returns all certificates in
/// index order. With `require_nontrivial` the correlata themselves are
/// skipped as candidates.
pub fn find_common_causes(
    lattice: &Lattice,
    measure: &Measure,
    a: ElementId,
    b: ElementId,
    require_nontrivial: bool,
) -> Vec<CommonCauseCertificate> {
    let mut out = Vec::new();
    for c in lattice.elements() {
        if require_nontrivial && (c == a || c == b) {
            continue;
        }
        if let Ok(cert) = check_common_cause(lattice, measure, a, b, c) {
            out.push(cert);
        }
    }
    out
}

fn has_nontrivial_cause(lattice: &Lattice, measure: &Measure, a: ElementId, b: ElementId) -> bool {
    lattice
        .elements()
        .any(|c| c != a && c != b && check_common_cause(lattice, measure, a, b, c).is_ok())
}

/// Decides common-cause closedness: every positively correlated pair of
/// distinct compatible elements must admit at least one nontrivial common
/// cause. Returns the first unexplained witness otherwise.
pub fn is_common_cause_closed(lattice: &Lattice, measure: &Measure) -> Closedness {
    for witness in correlated_pairs(lattice, measure) {
        if !has_nontrivial_cause(lattice, measure, witness.a, witness.b) {
            return Closedness::NotClosed { witness };
        }
    }
    Closedness::Closed
}

/// The correlated pair manufactured from two distinct atoms with
/// `phi(p v q) < 1`: the pair `(p v q, p)` satisfies
/// `phi(A ^ B) = phi(p) > phi(p v q) phi(p)` whenever `phi(p) > 0`.
pub fn correlation_from_atoms(
    lattice: &Lattice,
    measure: &Measure,
    p: ElementId,
    q: ElementId,
) -> Result<CorrelationWitness, CorrelationFromAtomsError> {
    let atoms = lattice.atoms();
    if !atoms.contains(&p) {
        return Err(CorrelationFromAtomsError::NotAtom(p));
    }
    if !atoms.contains(&q) {
        return Err(CorrelationFromAtomsError::NotAtom(q));
    }
    if p == q {
        return Err(CorrelationFromAtomsError::SameAtom);
    }
    let join = lattice.join(p, q);
    let phi_join = measure.value(join);
    if phi_join.is_one() {
        return Err(CorrelationFromAtomsError::JoinHasFullMeasure);
    }
    let phi_p = measure.value(p);
    if phi_p.is_zero() {
        return Err(CorrelationFromAtomsError::AtomHasZeroMeasure);
    }
    // p <= p v q, so the meet is p itself and the pair is comparable,
    // hence compatible; a < b by index is normalized below.
    let (a, b) = if join.0 < p.0 { (join, p) } else { (p, join) };
    let lhs = phi_p.clone();
    let rhs = phi_join * phi_p;
    debug_assert!(lhs > rhs);
    Ok(CorrelationWitness { a, b, lhs, rhs })
}

pub fn witness_json(lattice: &Lattice, w: &CorrelationWitness) -> Value {
    json!({
        "a": lattice.element_name(w.a),
        "b": lattice.element_name(w.b),
        "lhs": ratio_json(&w.lhs),
        "rhs": ratio_json(&w.rhs),
    })
}

pub fn certificate_json(lattice: &Lattice, cert: &CommonCauseCertificate) -> Value {
    let occ = |c: &OccCondition, holds: bool| json!({"lhs": ratio_json(&c.lhs), "rhs": ratio_json(&c.rhs), "holds": holds});
    json!({
        "c": lattice.element_name(cert.c),
        "phi_c": ratio_json(&cert.phi_c),
        "compatible_with_a": cert.compatible_with_a,
        "compatible_with_b": cert.compatible_with_b,
        "occ1": occ(&cert.occ1, true),
        "occ2": occ(&cert.occ2, true),
        "occ3": occ(&cert.occ3, true),
        "occ4": occ(&cert.occ4, true),
        "nontrivial": cert.nontrivial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greechie::{parse_diagram, paste};
    use crate::ratio::ratio;
    use crate::states::{measure_from_atom_weights, random_state, uniform_weights};

    fn boolean3() -> (Lattice, Measure) {
        let l = Lattice::boolean(["p", "q", "r"]).unwrap();
        let m = measure_from_atom_weights(&l, vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        (l, m)
    }

    /// Independent evaluation of the correlation predicate straight from
    /// subset masks, bypassing `correlated_pairs`.
    fn brute_correlated(l: &Lattice, m: &Measure) -> Vec<(ElementId, ElementId)> {
        let mut out = Vec::new();
        for a in l.elements() {
            for b in l.elements() {
                if a.0 < b.0
                    && l.is_compatible(a, b)
                    && m.value(l.meet(a, b)) > m.value(a) * m.value(b)
                {
                    out.push((a, b));
                }
            }
        }
        out
    }

    #[test]
    fn two_squared_has_no_correlations() {
        let l = Lattice::boolean(["p", "q"]).unwrap();
        let m = measure_from_atom_weights(&l, vec![ratio(1, 3), ratio(2, 3)]).unwrap();
        assert!(correlated_pairs(&l, &m).is_empty());
        assert!(is_common_cause_closed(&l, &m).is_closed());
    }

    #[test]
    fn canonical_pair_is_correlated() {
        let (l, m) = boolean3();
        let p = l.element_by_name("p").unwrap();
        let pq = l.parse_element("p|q").unwrap();
        let witnesses = correlated_pairs(&l, &m);
        let w = witnesses
            .iter()
            .find(|w| (w.a, w.b) == (p, pq))
            .expect("(p, p v q) must be correlated");
        assert_eq!(w.lhs, ratio(1, 2));
        assert_eq!(w.rhs, ratio(3, 8));
        // Cross-check the full listing against the independent scan.
        let brute = brute_correlated(&l, &m);
        let got: Vec<(ElementId, ElementId)> = witnesses.iter().map(|w| (w.a, w.b)).collect();
        assert_eq!(got, brute);
    }

    #[test]
    fn mo_lattices_have_no_correlations() {
        for n in 2..=6 {
            let l = Lattice::mo(n).unwrap();
            for seed in [1u64, 2, 3] {
                let m = random_state(&l, seed, 64).unwrap();
                assert!(correlated_pairs(&l, &m).is_empty(), "MO_{n} seed {seed}");
                assert!(is_common_cause_closed(&l, &m).is_closed());
            }
        }
    }

    #[test]
    fn canonical_counterexample_candidate_failures() {
        // Golden values recomputed by hand from the weights (1/2, 1/4, 1/4):
        // candidate q fails the second screening-off with 2/3 vs 4/9;
        // candidate r passes both screening-offs and fails relevance 0 vs 1.
        let (l, m) = boolean3();
        let p = l.element_by_name("p").unwrap();
        let q = l.element_by_name("q").unwrap();
        let r = l.element_by_name("r").unwrap();
        let a = l.parse_element("p|q").unwrap();
        let b = p;

        match check_common_cause(&l, &m, a, b, q).unwrap_err() {
            CommonCauseFailure::Occ2(cond) => {
                assert_eq!(cond.lhs, ratio(2, 3));
                assert_eq!(cond.rhs, ratio(4, 9));
            }
            other => panic!("candidate q should fail occ2, got {other:?}"),
        }
        match check_common_cause(&l, &m, a, b, r).unwrap_err() {
            CommonCauseFailure::Occ3(cond) => {
                assert_eq!(cond.lhs, ratio(0, 1));
                assert_eq!(cond.rhs, ratio(1, 1));
            }
            other => panic!("candidate r should fail occ3, got {other:?}"),
        }
        match check_common_cause(&l, &m, a, b, l.parse_element("p|r").unwrap()).unwrap_err() {
            CommonCauseFailure::Occ1(cond) => {
                assert_eq!(cond.lhs, ratio(2, 3));
                assert_eq!(cond.rhs, ratio(4, 9));
            }
            other => panic!("candidate p|r should fail occ1, got {other:?}"),
        }
        match check_common_cause(&l, &m, a, b, l.parse_element("q|r").unwrap()).unwrap_err() {
            CommonCauseFailure::Occ3(cond) => {
                assert_eq!(cond.lhs, ratio(1, 2));
                assert_eq!(cond.rhs, ratio(1, 1));
            }
            other => panic!("candidate q|r should fail occ3, got {other:?}"),
        }
        // Probability gate.
        assert!(matches!(
            check_common_cause(&l, &m, a, b, l.top()),
            Err(CommonCauseFailure::ProbabilityNotStrict { .. })
        ));
        assert!(matches!(
            check_common_cause(&l, &m, a, b, l.bottom()),
            Err(CommonCauseFailure::ProbabilityNotStrict { .. })
        ));
        // And the exhaustive nontrivial search is empty.
        assert!(find_common_causes(&l, &m, a, b, true).is_empty());
    }

    #[test]
    fn boolean3_canonical_is_not_closed() {
        let (l, m) = boolean3();
        match is_common_cause_closed(&l, &m) {
            Closedness::NotClosed { witness } => {
                assert!(find_common_causes(&l, &m, witness.a, witness.b, true).is_empty());
            }
            Closedness::Closed => panic!("three atoms with a correlation cannot be closed"),
        }
    }

    #[test]
    fn trivial_candidates_certify_when_allowed() {
        let (l, m) = boolean3();
        let a = l.parse_element("p|q").unwrap();
        let b = l.element_by_name("p").unwrap();
        let with_trivial = find_common_causes(&l, &m, a, b, false);
        assert!(with_trivial.iter().any(|c| c.c == a || c.c == b));
        assert!(with_trivial
            .iter()
            .all(|c| !c.nontrivial || (c.c != a && c.c != b)));
        // The flag only filters; it does not change any certificate.
        let nontrivial_only = find_common_causes(&l, &m, a, b, true);
        let filtered: Vec<_> = with_trivial.into_iter().filter(|c| c.nontrivial).collect();
        assert_eq!(nontrivial_only, filtered);
    }

    #[test]
    fn certificates_reverify_and_forgeries_fail() {
        let (l, m) = boolean3();
        let a = l.parse_element("p|q").unwrap();
        let b = l.element_by_name("p").unwrap();
        for cert in find_common_causes(&l, &m, a, b, false) {
            assert!(cert.reverify(&l, &m, a, b));
            let mut forged = cert.clone();
            forged.occ3.rhs = &forged.occ3.lhs + ratio(1, 1);
            assert!(!forged.reverify(&l, &m, a, b));
        }
    }

    #[test]
    fn condition_symmetry_under_swapping_correlata() {
        // Swapping a and b swaps occ3 and occ4 and leaves the verdict alone.
        let (l, m) = boolean3();
        let a = l.parse_element("p|q").unwrap();
        let b = l.element_by_name("p").unwrap();
        for c in l.elements() {
            let fwd = check_common_cause(&l, &m, a, b, c);
            let bwd = check_common_cause(&l, &m, b, a, c);
            assert_eq!(fwd.is_ok(), bwd.is_ok(), "verdicts differ at {c}");
            if let (Ok(x), Ok(y)) = (fwd, bwd) {
                assert_eq!(x.occ3, y.occ4);
                assert_eq!(x.occ4, y.occ3);
                assert_eq!(x.occ1, y.occ1);
            }
        }
    }

    #[test]
    fn search_results_do_not_depend_on_scan_order() {
        let (l, m) = boolean3();
        let a = l.parse_element("p|q").unwrap();
        let b = l.element_by_name("p").unwrap();
        let forward = find_common_causes(&l, &m, a, b, false);
        let mut reversed: Vec<CommonCauseCertificate> = l
            .elements()
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .filter_map(|c| check_common_cause(&l, &m, a, b, c).ok())
            .collect();
        reversed.reverse();
        assert_eq!(forward, reversed);
    }

    #[test]
    fn correlation_from_atoms_matches_the_construction() {
        let (l, m) = boolean3();
        let q = l.element_by_name("q").unwrap();
        let r = l.element_by_name("r").unwrap();
        let w = correlation_from_atoms(&l, &m, q, r).unwrap();
        assert_eq!(w.lhs, ratio(1, 4));
        assert_eq!(w.rhs, ratio(1, 8));
        assert_eq!(w.a, q);
        assert_eq!(w.b, l.join(q, r));

        // Two atoms only: the join carries full measure.
        let l2 = Lattice::boolean(["p", "q"]).unwrap();
        let m2 = measure_from_atom_weights(&l2, uniform_weights(2)).unwrap();
        let atoms = l2.atoms();
        assert_eq!(
            correlation_from_atoms(&l2, &m2, atoms[0], atoms[1]).unwrap_err(),
            CorrelationFromAtomsError::JoinHasFullMeasure
        );
    }

    #[test]
    fn correlation_from_atoms_works_on_pasted_lattices() {
        let l = paste(&parse_diagram("block: a b c\nblock: c d e").unwrap()).unwrap();
        let m = random_state(&l, 21, 64).unwrap();
        let a = l.element_by_name("a").unwrap();
        let b = l.element_by_name("b").unwrap();
        let w = correlation_from_atoms(&l, &m, a, b).unwrap();
        assert!(w.lhs > w.rhs);
        // phi(a v b) = 1 - phi(c).
        let c = l.element_by_name("c").unwrap();
        assert_eq!(m.value(l.join(a, b)), ratio(1, 1) - m.value(c));
    }

    #[test]
    fn no_witness_has_equal_sides() {
        let (l, m) = boolean3();
        for w in correlated_pairs(&l, &m) {
            assert!(w.lhs > w.rhs);
            assert!(w.gap() > ratio(0, 1));
        }
        for w in anticorrelated_pairs(&l, &m) {
            assert!(w.lhs < w.rhs);
        }
    }

    #[test]
    fn incompatible_pairs_are_ignored() {
        let l = Lattice::mo(2).unwrap();
        let m = random_state(&l, 9, 64).unwrap();
        let a = ElementId(1);
        let b = ElementId(3);
        assert!(!l.is_compatible(a, b));
        assert!(correlated_pairs(&l, &m)
            .iter()
            .all(|w| (w.a, w.b) != (a, b)));
        // An incompatible candidate is refused at the first gate.
        let chain = paste(&parse_diagram("block: a b c\nblock: c d e").unwrap()).unwrap();
        let cm = random_state(&chain, 2, 64).unwrap();
        let ca = chain.element_by_name("a").unwrap();
        let cb = chain.parse_element("a|b").unwrap();
        let d = chain.element_by_name("d").unwrap();
        assert!(matches!(
            check_common_cause(&chain, &cm, cb, ca, d),
            Err(CommonCauseFailure::IncompatibleWithA | CommonCauseFailure::IncompatibleWithB)
        ));
    }

    #[test]
    fn witness_and_certificate_json_shapes() {
        let (l, m) = boolean3();
        let a = l.parse_element("p|q").unwrap();
        let b = l.element_by_name("p").unwrap();
        let w = CorrelationWitness {
            a: b,
            b: a,
            lhs: ratio(1, 2),
            rhs: ratio(3, 8),
        };
        let v = witness_json(&l, &w);
        assert_eq!(v["a"], "p");
        assert_eq!(v["lhs"]["num"], serde_json::json!(1));
        let cert = find_common_causes(&l, &m, a, b, false)
            .into_iter()
            .next()
            .unwrap();
        let cv = certificate_json(&l, &cert);
        assert_eq!(cv["occ1"]["holds"], serde_json::json!(true));
    }
}
