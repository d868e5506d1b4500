//! The structure results as falsifiable properties over finite instances.
//!
//! Each check gates explicitly on its hypotheses (an iff with an unmet
//! hypothesis is evidence of nothing) and reports pass, fail with a
//! re-verifiable witness, not-applicable with the unmet hypothesis, or
//! report-only for observations outside the proved scope (non-Boolean
//! correlation equivalences are recorded as exploration, never adjudicated).
//!
//! `run_suite` drives the checks over a curated instance grid: Boolean
//! algebras 2^1..2^max, the MO_n horizontal sums, and three pasted block
//! diagrams, with deterministic per-seed random faithful states. Config
//! faults inject a broken measure or a forged certificate; the suite must
//! loudly fail on them.

use serde_json::{json, Value};
use thiserror::Error;

use crate::causality::{
    certificate_json, correlated_pairs, find_common_causes, is_common_cause_closed, witness_json,
    Closedness,
};
use crate::greechie::{parse_diagram, paste};
use crate::lattice::Lattice;
use crate::ratio::ratio;
use crate::states::{
    is_faithful, measure_from_atom_weights, phi_atoms, random_state, validate_measure, Measure,
};

/// Curated pasted-diagram fixtures: 2-block chain, 3-block chain, and a
/// 3-block star sharing one atom.
pub const GREECHIE_FIXTURES: &[(&str, &str)] = &[
    ("chain2", "block: a b c\nblock: c d e\n"),
    ("chain3", "block: a b c\nblock: c d e\nblock: e f g\n"),
    ("star3", "block: a b c\nblock: c d e\nblock: c f g\n"),
];

pub fn greechie_fixture(name: &str) -> Option<Lattice> {
    GREECHIE_FIXTURES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| {
            paste(&parse_diagram(text).expect("fixture parses")).expect("fixture pastes")
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    ReportOnly,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::NotApplicable => "not-applicable",
            Verdict::ReportOnly => "report-only",
        }
    }
}

/// One property evaluated on one instance. Failing reports always carry a
/// witness payload that re-verifies against the instance.
#[derive(Debug, Clone)]
pub struct PropertyReport {
    pub property: String,
    pub instance: String,
    pub verdict: Verdict,
    pub detail: Option<String>,
    pub witness: Option<Value>,
}

impl PropertyReport {
    fn new(property: &str, instance: &str, verdict: Verdict) -> Self {
        PropertyReport {
            property: property.to_string(),
            instance: instance.to_string(),
            verdict,
            detail: None,
            witness: None,
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    fn with_witness(mut self, witness: Value) -> Self {
        self.witness = Some(witness);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        map.insert("property".into(), json!(self.property));
        map.insert("instance".into(), json!(self.instance));
        map.insert("verdict".into(), json!(self.verdict.as_str()));
        if let Some(detail) = &self.detail {
            map.insert("detail".into(), json!(detail));
        }
        if let Some(witness) = &self.witness {
            map.insert("witness".into(), witness.clone());
        }
        Value::Object(map)
    }
}

/// Property names in suite order, for `--list`.
pub const PROPERTY_NAMES: &[&str] = &[
    "measure-validation",
    "faithful-atom-lemma",
    "correlation-iff",
    "two-atom-not-closed",
    "characterization",
    "sufficiency",
    "certificate-reverification",
    "mo-family",
];

fn is_boolean(lattice: &Lattice) -> bool {
    lattice.is_powerset() || lattice.is_distributive().is_ok()
}

/// Re-validates the instance measure from its raw value table. Healthy
/// instances always pass; the broken-measure injection lands here.
pub fn check_measure_validation(
    lattice: &Lattice,
    raw: Vec<num_rational::BigRational>,
    instance: &str,
) -> PropertyReport {
    const NAME: &str = "measure-validation";
    match validate_measure(lattice, raw) {
        Ok(_) => PropertyReport::new(NAME, instance, Verdict::Pass),
        Err(err) => {
            let witness = match &err {
                crate::states::MeasureError::Additivity { a, b } => json!({
                    "pair": [lattice.element_name(*a), lattice.element_name(*b)],
                }),
                _ => json!({}),
            };
            PropertyReport::new(NAME, instance, Verdict::Fail)
                .with_detail(format!("measure rejected: {err}"))
                .with_witness(witness)
        }
    }
}

/// Faithful measures see the same atoms algebraically and measure-
/// theoretically: phi-atoms must equal atoms as sets.
pub fn check_faithful_atom_lemma(
    lattice: &Lattice,
    measure: &Measure,
    instance: &str,
) -> PropertyReport {
    const NAME: &str = "faithful-atom-lemma";
    if !is_faithful(lattice, measure) {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: measure is not faithful");
    }
    let algebraic = lattice.atoms();
    let measured = phi_atoms(lattice, measure);
    if algebraic == measured {
        PropertyReport::new(NAME, instance, Verdict::Pass)
    } else {
        let names = |xs: &[crate::lattice::ElementId]| -> Vec<String> {
            xs.iter().map(|&x| lattice.element_name(x)).collect()
        };
        PropertyReport::new(NAME, instance, Verdict::Fail)
            .with_detail("phi-atoms differ from algebraic atoms")
            .with_witness(json!({
                "atoms": names(&algebraic),
                "phi_atoms": names(&measured),
            }))
    }
}

/// On faithful Boolean instances with at least two atoms, a positive
/// correlation exists iff every pair of distinct atoms has
/// `phi(P v Q) < 1`. On non-Boolean instances the same equivalence is
/// recorded as exploration only.
pub fn check_correlation_iff(
    lattice: &Lattice,
    measure: &Measure,
    instance: &str,
) -> PropertyReport {
    const NAME: &str = "correlation-iff";
    if !is_faithful(lattice, measure) {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: measure is not faithful");
    }
    let atoms = lattice.atoms();
    if atoms.len() < 2 {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: fewer than two atoms");
    }
    let correlation_exists = !correlated_pairs(lattice, measure).is_empty();
    let one = ratio(1, 1);
    let mut broken_pair: Option<(String, String)> = None;
    for (i, &p) in atoms.iter().enumerate() {
        for &q in &atoms[i + 1..] {
            let join_below_one = measure.value(lattice.join(p, q)) < one;
            if correlation_exists != join_below_one {
                broken_pair = Some((lattice.element_name(p), lattice.element_name(q)));
                break;
            }
        }
        if broken_pair.is_some() {
            break;
        }
    }
    if !is_boolean(lattice) {
        let detail = match &broken_pair {
            None => format!(
                "non-Boolean observation: equivalence held on every atom pair \
                 (correlation exists: {correlation_exists})"
            ),
            Some((p, q)) => {
                format!("non-Boolean observation: equivalence broke at atom pair ({p}, {q})")
            }
        };
        return PropertyReport::new(NAME, instance, Verdict::ReportOnly).with_detail(detail);
    }
    match broken_pair {
        None => PropertyReport::new(NAME, instance, Verdict::Pass),
        Some((p, q)) => PropertyReport::new(NAME, instance, Verdict::Fail)
            .with_detail("equivalence failed on an atom pair")
            .with_witness(json!({
                "pair": [p, q],
                "correlation_exists": correlation_exists,
            })),
    }
}

/// Two distinct atoms whose join stays below full measure rule out
/// closedness (faithful measures; any orthomodular lattice).
pub fn check_two_atom_not_closed(
    lattice: &Lattice,
    measure: &Measure,
    instance: &str,
) -> PropertyReport {
    const NAME: &str = "two-atom-not-closed";
    if !is_faithful(lattice, measure) {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: measure is not faithful");
    }
    let atoms = lattice.atoms();
    let one = ratio(1, 1);
    let hypothesis = atoms.iter().enumerate().any(|(i, &p)| {
        atoms[i + 1..]
            .iter()
            .any(|&q| measure.value(lattice.join(p, q)) < one)
    });
    if !hypothesis {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: no atom pair with phi(P v Q) < 1");
    }
    match is_common_cause_closed(lattice, measure) {
        Closedness::NotClosed { witness } => PropertyReport::new(NAME, instance, Verdict::Pass)
            .with_witness(witness_json(lattice, &witness)),
        Closedness::Closed => PropertyReport::new(NAME, instance, Verdict::Fail)
            .with_detail("space reported closed despite a low atom-pair join")
            .with_witness(json!({"closed": true})),
    }
}

/// Faithful Boolean instances with a correlation are closed iff they have
/// at most one phi-atom.
pub fn check_characterization(
    lattice: &Lattice,
    measure: &Measure,
    instance: &str,
) -> PropertyReport {
    const NAME: &str = "characterization";
    if !is_faithful(lattice, measure) {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: measure is not faithful");
    }
    if !is_boolean(lattice) {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: lattice is not Boolean");
    }
    if correlated_pairs(lattice, measure).is_empty() {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: no correlated pair exists");
    }
    let closed = is_common_cause_closed(lattice, measure).is_closed();
    let few_atoms = phi_atoms(lattice, measure).len() <= 1;
    if closed == few_atoms {
        PropertyReport::new(NAME, instance, Verdict::Pass)
    } else {
        PropertyReport::new(NAME, instance, Verdict::Fail)
            .with_detail("closedness disagrees with the phi-atom count")
            .with_witness(json!({
                "closed": closed,
                "phi_atoms": phi_atoms(lattice, measure).len(),
            }))
    }
}

/// At most one phi-atom suffices for closedness (faithful measures). On
/// finite faithful instances the hypothesis forces the two-element lattice,
/// so the check is vacuous but still run.
pub fn check_sufficiency(lattice: &Lattice, measure: &Measure, instance: &str) -> PropertyReport {
    const NAME: &str = "sufficiency";
    if !is_faithful(lattice, measure) {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: measure is not faithful");
    }
    if phi_atoms(lattice, measure).len() > 1 {
        return PropertyReport::new(NAME, instance, Verdict::NotApplicable)
            .with_detail("hypothesis unmet: more than one phi-atom");
    }
    match is_common_cause_closed(lattice, measure) {
        Closedness::Closed => PropertyReport::new(NAME, instance, Verdict::Pass),
        Closedness::NotClosed { witness } => PropertyReport::new(NAME, instance, Verdict::Fail)
            .with_detail("space with at most one phi-atom reported not closed")
            .with_witness(witness_json(lattice, &witness)),
    }
}

/// Every certificate the search produces must re-verify from scratch.
/// `forge` tampers with the first certificate to prove the check can fail.
pub fn check_certificates_reverify(
    lattice: &Lattice,
    measure: &Measure,
    instance: &str,
    forge: bool,
) -> PropertyReport {
    const NAME: &str = "certificate-reverification";
    const PAIR_CAP: usize = 8;
    let mut checked = 0usize;
    for witness in correlated_pairs(lattice, measure)
        .into_iter()
        .take(PAIR_CAP)
    {
        let mut certs = find_common_causes(lattice, measure, witness.a, witness.b, false);
        if forge {
            if let Some(first) = certs.first_mut() {
                first.occ1.lhs = &first.occ1.lhs + ratio(1, 1);
            }
        }
        for cert in &certs {
            checked += 1;
            if !cert.reverify(lattice, measure, witness.a, witness.b) {
                return PropertyReport::new(NAME, instance, Verdict::Fail)
                    .with_detail("a certificate failed re-verification")
                    .with_witness(json!({
                        "pair": witness_json(lattice, &witness),
                        "certificate": certificate_json(lattice, cert),
                    }));
            }
        }
    }
    PropertyReport::new(NAME, instance, Verdict::Pass)
        .with_detail(format!("{checked} certificates re-verified"))
}

/// MO_n admits no positive correlations between distinct compatible pairs,
/// hence is vacuously closed, under every sampled faithful state.
pub fn check_mo_family(n: usize, seeds: &[u64], denominator_bound: u32) -> PropertyReport {
    const NAME: &str = "mo-family";
    let instance = format!("mo[n={n},seeds={}]", seeds.len());
    if n == 0 {
        return PropertyReport::new(NAME, &instance, Verdict::NotApplicable)
            .with_detail("MO_0 does not exist");
    }
    let lattice = match Lattice::mo(n) {
        Ok(l) => l,
        Err(err) => {
            return PropertyReport::new(NAME, &instance, Verdict::Fail)
                .with_detail(format!("construction failed: {err}"))
        }
    };
    for &seed in seeds {
        let Some(measure) = random_state(&lattice, seed, denominator_bound) else {
            return PropertyReport::new(NAME, &instance, Verdict::Fail)
                .with_detail(format!("no faithful state found for seed {seed}"));
        };
        let correlations = correlated_pairs(&lattice, &measure);
        if let Some(witness) = correlations.first() {
            return PropertyReport::new(NAME, &instance, Verdict::Fail)
                .with_detail(format!("unexpected correlation at seed {seed}"))
                .with_witness(witness_json(&lattice, witness));
        }
        if let Closedness::NotClosed { witness } = is_common_cause_closed(&lattice, &measure) {
            return PropertyReport::new(NAME, &instance, Verdict::Fail)
                .with_detail(format!("not closed at seed {seed}"))
                .with_witness(witness_json(&lattice, &witness));
        }
    }
    PropertyReport::new(NAME, &instance, Verdict::Pass)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Boolean,
    Mo,
    Greechie,
}

impl Family {
    fn as_str(self) -> &'static str {
        match self {
            Family::Boolean => "boolean",
            Family::Mo => "mo",
            Family::Greechie => "greechie",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    None,
    BrokenMeasure,
    FakeCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub families: Vec<Family>,
    /// Boolean ladder: 2^1 .. 2^max_atoms.
    pub max_atoms: usize,
    /// MO ladder: MO_1 .. MO_mo_max.
    pub mo_max: usize,
    pub seeds: Vec<u64>,
    pub denominator_bound: u32,
    pub inject_fault: Fault,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            families: vec![Family::Boolean, Family::Mo, Family::Greechie],
            max_atoms: 5,
            mo_max: 8,
            seeds: (1..=5).collect(),
            denominator_bound: 64,
            inject_fault: Fault::None,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: unknown family `{family}`")]
    UnknownFamily { line: usize, family: String },
    #[error("line {line}: unknown fault `{fault}`")]
    UnknownFault { line: usize, fault: String },
    #[error("line {line}: bad number `{value}`")]
    BadNumber { line: usize, value: String },
}

/// Parses suite configs: `key = value` lines with `#` comments. Keys:
/// `families` (csv of boolean/mo/greechie), `max_atoms`, `mo_max`, `seeds`
/// (csv of u64), `denominator_bound`, `inject_fault`
/// (none/broken-measure/fake-certificate). Missing keys keep defaults.
pub fn parse_suite_config(text: &str) -> Result<SuiteConfig, ConfigError> {
    let mut config = SuiteConfig::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| ConfigError::Syntax {
            line,
            text: content.to_string(),
        })?;
        let key = key.trim();
        let value = value.trim();
        let parse_num = |v: &str| -> Result<usize, ConfigError> {
            v.parse().map_err(|_| ConfigError::BadNumber {
                line,
                value: v.to_string(),
            })
        };
        match key {
            "families" => {
                let mut families = Vec::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    families.push(match item {
                        "boolean" => Family::Boolean,
                        "mo" => Family::Mo,
                        "greechie" => Family::Greechie,
                        other => {
                            return Err(ConfigError::UnknownFamily {
                                line,
                                family: other.to_string(),
                            })
                        }
                    });
                }
                config.families = families;
            }
            "max_atoms" => config.max_atoms = parse_num(value)?,
            "mo_max" => config.mo_max = parse_num(value)?,
            "seeds" => {
                let mut seeds = Vec::new();
                for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    seeds.push(item.parse().map_err(|_| ConfigError::BadNumber {
                        line,
                        value: item.to_string(),
                    })?);
                }
                config.seeds = seeds;
            }
            "denominator_bound" => config.denominator_bound = parse_num(value)? as u32,
            "inject_fault" => {
                config.inject_fault = match value {
                    "none" => Fault::None,
                    "broken-measure" => Fault::BrokenMeasure,
                    "fake-certificate" => Fault::FakeCertificate,
                    other => {
                        return Err(ConfigError::UnknownFault {
                            line,
                            fault: other.to_string(),
                        })
                    }
                };
            }
            other => {
                return Err(ConfigError::UnknownKey {
                    line,
                    key: other.to_string(),
                })
            }
        }
    }
    Ok(config)
}

fn instance_battery(
    lattice: &Lattice,
    measure: &Measure,
    instance: &str,
    out: &mut Vec<PropertyReport>,
) {
    let raw: Vec<num_rational::BigRational> =
        lattice.elements().map(|x| measure.value(x)).collect();
    out.push(check_measure_validation(lattice, raw, instance));
    out.push(check_faithful_atom_lemma(lattice, measure, instance));
    out.push(check_correlation_iff(lattice, measure, instance));
    out.push(check_two_atom_not_closed(lattice, measure, instance));
    out.push(check_characterization(lattice, measure, instance));
    out.push(check_sufficiency(lattice, measure, instance));
    out.push(check_certificates_reverify(
        lattice, measure, instance, false,
    ));
}

fn injected_reports(fault: Fault, out: &mut Vec<PropertyReport>) {
    match fault {
        Fault::None => {}
        Fault::BrokenMeasure => {
            // A valuation additive everywhere except one orthogonal pair.
            let lattice = Lattice::boolean(["p", "q"]).expect("2 atoms");
            let mut raw = vec![ratio(0, 1), ratio(1, 2), ratio(1, 2), ratio(1, 1)];
            raw[1] = ratio(1, 3);
            out.push(check_measure_validation(
                &lattice,
                raw,
                "injected[broken-measure]",
            ));
        }
        Fault::FakeCertificate => {
            let lattice = Lattice::boolean(["p", "q", "r"]).expect("3 atoms");
            let measure =
                measure_from_atom_weights(&lattice, vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)])
                    .expect("canonical weights");
            out.push(check_certificates_reverify(
                &lattice,
                &measure,
                "injected[fake-certificate]",
                true,
            ));
        }
    }
}

fn run_instance(
    lattice: &Lattice,
    instance: &str,
    seed: u64,
    bound: u32,
    out: &mut Vec<PropertyReport>,
) {
    match random_state(lattice, seed, bound) {
        Some(measure) => instance_battery(lattice, &measure, instance, out),
        None => out.push(
            PropertyReport::new("measure-validation", instance, Verdict::Fail)
                .with_detail("no faithful state found within the sampling budget")
                .with_witness(json!({ "seed": seed })),
        ),
    }
}

/// Runs the whole property grid. Report order is fixed by the config, not
/// by execution; the list is a deterministic function of the config.
/// Instances that cannot even be constructed (sizes over the caps) become
/// failure reports rather than panics.
pub fn run_suite(config: &SuiteConfig) -> Vec<PropertyReport> {
    let mut out = Vec::new();
    for &family in &config.families {
        match family {
            Family::Boolean => {
                for atoms in 1..=config.max_atoms {
                    let names: Vec<String> = if atoms <= 11 {
                        (0..atoms)
                            .map(|i| ((b'p' + i as u8) as char).to_string())
                            .collect()
                    } else {
                        (0..atoms).map(|i| format!("x{i}")).collect()
                    };
                    let instance_base = format!("{}[atoms={atoms}]", family.as_str());
                    let lattice = match Lattice::boolean(names) {
                        Ok(l) => l,
                        Err(err) => {
                            out.push(
                                PropertyReport::new(
                                    "measure-validation",
                                    &instance_base,
                                    Verdict::Fail,
                                )
                                .with_detail(format!("construction failed: {err}")),
                            );
                            continue;
                        }
                    };
                    for &seed in &config.seeds {
                        let instance = format!("{}[atoms={atoms},seed={seed}]", family.as_str());
                        run_instance(&lattice, &instance, seed, config.denominator_bound, &mut out);
                    }
                }
            }
            Family::Mo => {
                for n in 1..=config.mo_max {
                    let lattice = match Lattice::mo(n) {
                        Ok(l) => l,
                        Err(err) => {
                            out.push(
                                PropertyReport::new(
                                    "measure-validation",
                                    &format!("mo[n={n}]"),
                                    Verdict::Fail,
                                )
                                .with_detail(format!("construction failed: {err}")),
                            );
                            continue;
                        }
                    };
                    for &seed in &config.seeds {
                        let instance = format!("{}[n={n},seed={seed}]", family.as_str());
                        run_instance(&lattice, &instance, seed, config.denominator_bound, &mut out);
                    }
                    out.push(check_mo_family(n, &config.seeds, config.denominator_bound));
                }
            }
            Family::Greechie => {
                for (name, text) in GREECHIE_FIXTURES {
                    let lattice = paste(&parse_diagram(text).expect("fixture parses"))
                        .expect("fixture pastes");
                    for &seed in &config.seeds {
                        let instance = format!("{}[{name},seed={seed}]", family.as_str());
                        run_instance(&lattice, &instance, seed, config.denominator_bound, &mut out);
                    }
                }
            }
        }
    }
    injected_reports(config.inject_fault, &mut out);
    out
}

pub fn has_failures(reports: &[PropertyReport]) -> bool {
    reports.iter().any(|r| r.verdict == Verdict::Fail)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::ElementId;
    use crate::states::uniform_weights;

    fn canonical() -> (Lattice, Measure) {
        let l = Lattice::boolean(["p", "q", "r"]).unwrap();
        let m = measure_from_atom_weights(&l, vec![ratio(1, 2), ratio(1, 4), ratio(1, 4)]).unwrap();
        (l, m)
    }

    #[test]
    fn faithful_atom_lemma_pass_and_gate() {
        let (l, m) = canonical();
        assert_eq!(
            check_faithful_atom_lemma(&l, &m, "t").verdict,
            Verdict::Pass
        );
        let degenerate =
            measure_from_atom_weights(&l, vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)]).unwrap();
        assert_eq!(
            check_faithful_atom_lemma(&l, &degenerate, "t").verdict,
            Verdict::NotApplicable
        );
        let mo3 = Lattice::mo(3).unwrap();
        let m3 = random_state(&mo3, 17, 64).unwrap();
        assert_eq!(
            check_faithful_atom_lemma(&mo3, &m3, "t").verdict,
            Verdict::Pass
        );
    }

    #[test]
    fn correlation_iff_across_sizes() {
        // 2^2: both sides false on the only atom pair.
        let l2 = Lattice::boolean(["p", "q"]).unwrap();
        let m2 = measure_from_atom_weights(&l2, uniform_weights(2)).unwrap();
        assert_eq!(check_correlation_iff(&l2, &m2, "t").verdict, Verdict::Pass);
        // 2^3 and up: both sides true on every pair.
        let (l3, m3) = canonical();
        assert_eq!(check_correlation_iff(&l3, &m3, "t").verdict, Verdict::Pass);
        // 2^1: gated.
        let l1 = Lattice::boolean(["p"]).unwrap();
        let m1 = measure_from_atom_weights(&l1, uniform_weights(1)).unwrap();
        assert_eq!(
            check_correlation_iff(&l1, &m1, "t").verdict,
            Verdict::NotApplicable
        );
        // Pasted fixture: report-only.
        let chain = greechie_fixture("chain2").unwrap();
        let cm = random_state(&chain, 3, 64).unwrap();
        let report = check_correlation_iff(&chain, &cm, "t");
        assert_eq!(report.verdict, Verdict::ReportOnly);
        assert!(report.detail.unwrap().contains("non-Boolean"));
    }

    #[test]
    fn two_atom_not_closed_pass_and_gates() {
        let (l, m) = canonical();
        let report = check_two_atom_not_closed(&l, &m, "t");
        assert_eq!(report.verdict, Verdict::Pass);
        assert!(report.witness.is_some());
        // 2^2: hypothesis unmet (the only join is I).
        let l2 = Lattice::boolean(["p", "q"]).unwrap();
        let m2 = measure_from_atom_weights(&l2, uniform_weights(2)).unwrap();
        assert_eq!(
            check_two_atom_not_closed(&l2, &m2, "t").verdict,
            Verdict::NotApplicable
        );
        // Pasted chain: applies and passes (not closed).
        let chain = greechie_fixture("chain2").unwrap();
        let cm = random_state(&chain, 8, 64).unwrap();
        assert_eq!(
            check_two_atom_not_closed(&chain, &cm, "t").verdict,
            Verdict::Pass
        );
    }

    #[test]
    fn characterization_and_sufficiency() {
        let (l, m) = canonical();
        assert_eq!(check_characterization(&l, &m, "t").verdict, Verdict::Pass);
        // No correlations on 2^2: gated.
        let l2 = Lattice::boolean(["p", "q"]).unwrap();
        let m2 = measure_from_atom_weights(&l2, uniform_weights(2)).unwrap();
        assert_eq!(
            check_characterization(&l2, &m2, "t").verdict,
            Verdict::NotApplicable
        );
        // Sufficiency: the two-element lattice is the one applicable case.
        let l1 = Lattice::boolean(["p"]).unwrap();
        let m1 = measure_from_atom_weights(&l1, uniform_weights(1)).unwrap();
        assert_eq!(check_sufficiency(&l1, &m1, "t").verdict, Verdict::Pass);
        assert_eq!(
            check_sufficiency(&l, &m, "t").verdict,
            Verdict::NotApplicable
        );
        // Non-faithful inputs are gated too.
        let degenerate =
            measure_from_atom_weights(&l, vec![ratio(1, 1), ratio(0, 1), ratio(0, 1)]).unwrap();
        assert_eq!(
            check_sufficiency(&l, &degenerate, "t").verdict,
            Verdict::NotApplicable
        );
        assert_eq!(
            check_characterization(&l, &degenerate, "t").verdict,
            Verdict::NotApplicable
        );
    }

    #[test]
    fn mo_family_passes_and_mo1_is_consistent() {
        let seeds: Vec<u64> = (1..=10).collect();
        for n in 1..=4 {
            let report = check_mo_family(n, &seeds, 64);
            assert_eq!(report.verdict, Verdict::Pass, "MO_{n}: {:?}", report.detail);
        }
    }

    #[test]
    fn certificate_reverification_detects_forgery() {
        let (l, m) = canonical();
        assert_eq!(
            check_certificates_reverify(&l, &m, "t", false).verdict,
            Verdict::Pass
        );
        let forged = check_certificates_reverify(&l, &m, "t", true);
        assert_eq!(forged.verdict, Verdict::Fail);
        assert!(forged.witness.is_some());
    }

    #[test]
    fn config_parsing_defaults_and_errors() {
        let config = parse_suite_config(
            "# suite\nfamilies = boolean, mo\nmax_atoms = 4\nseeds = 1, 2\ninject_fault = none\n",
        )
        .unwrap();
        assert_eq!(config.families, vec![Family::Boolean, Family::Mo]);
        assert_eq!(config.max_atoms, 4);
        assert_eq!(config.seeds, vec![1, 2]);

        assert_eq!(parse_suite_config(""), Ok(SuiteConfig::default()));
        assert!(matches!(
            parse_suite_config("families = boolean, qux"),
            Err(ConfigError::UnknownFamily { .. })
        ));
        assert!(matches!(
            parse_suite_config("nope = 3"),
            Err(ConfigError::UnknownKey { .. })
        ));
        assert!(matches!(
            parse_suite_config("max_atoms = many"),
            Err(ConfigError::BadNumber { .. })
        ));
        assert!(matches!(
            parse_suite_config("just a line"),
            Err(ConfigError::Syntax { .. })
        ));
    }

    #[test]
    fn small_suite_run_is_clean_and_deterministic() {
        let config = SuiteConfig {
            families: vec![Family::Boolean, Family::Mo, Family::Greechie],
            max_atoms: 3,
            mo_max: 3,
            seeds: vec![1, 2],
            denominator_bound: 32,
            inject_fault: Fault::None,
        };
        let reports = run_suite(&config);
        assert!(
            !has_failures(&reports),
            "failures: {:?}",
            reports
                .iter()
                .filter(|r| r.verdict == Verdict::Fail)
                .map(|r| (&r.property, &r.instance))
                .collect::<Vec<_>>()
        );
        let again = run_suite(&config);
        assert_eq!(reports.len(), again.len());
        for (x, y) in reports.iter().zip(&again) {
            assert_eq!(x.to_json(), y.to_json());
        }
    }

    #[test]
    fn empty_config_families_yield_empty_reports() {
        let config = SuiteConfig {
            families: vec![],
            ..SuiteConfig::default()
        };
        let reports = run_suite(&config);
        assert!(reports.is_empty());
        assert!(!has_failures(&reports));
    }

    #[test]
    fn injections_flip_the_suite_to_failure() {
        let base = SuiteConfig {
            families: vec![Family::Boolean],
            max_atoms: 2,
            mo_max: 1,
            seeds: vec![1],
            denominator_bound: 16,
            inject_fault: Fault::None,
        };
        assert!(!has_failures(&run_suite(&base)));

        let broken = SuiteConfig {
            inject_fault: Fault::BrokenMeasure,
            ..base.clone()
        };
        let reports = run_suite(&broken);
        assert!(has_failures(&reports));
        let failing: Vec<_> = reports
            .iter()
            .filter(|r| r.verdict == Verdict::Fail)
            .collect();
        assert_eq!(failing.len(), 1);
        assert!(failing[0].witness.is_some() || failing[0].detail.is_some());

        let forged = SuiteConfig {
            inject_fault: Fault::FakeCertificate,
            ..base
        };
        assert!(has_failures(&run_suite(&forged)));
    }

    #[test]
    fn oversized_configs_fail_loudly_instead_of_panicking() {
        // Empty seed list: instances are constructed but no batteries run,
        // so only the 13-atom construction failure shows up.
        let config = SuiteConfig {
            families: vec![Family::Boolean],
            max_atoms: 13,
            seeds: vec![],
            ..SuiteConfig::default()
        };
        let reports = run_suite(&config);
        assert!(has_failures(&reports));
        assert!(reports
            .iter()
            .any(|r| r.detail.as_deref().unwrap_or("").contains("construction failed")));
    }

    #[test]
    fn greechie_fixture_lookup() {
        assert!(greechie_fixture("chain2").is_some());
        assert!(greechie_fixture("chain3").is_some());
        assert!(greechie_fixture("star3").is_some());
        assert!(greechie_fixture("nope").is_none());
        // chain3 shape: 2 + 7 + 7 = 16 elements.
        let chain3 = greechie_fixture("chain3").unwrap();
        assert_eq!(chain3.n(), 16);
        assert_eq!(chain3.atom_count(), 7);
    }

    #[test]
    fn report_json_shape() {
        let report = PropertyReport::new(
            "faithful-atom-lemma",
            "boolean[atoms=3,seed=1]",
            Verdict::Pass,
        );
        let v = report.to_json();
        assert_eq!(v["property"], "faithful-atom-lemma");
        assert_eq!(v["verdict"], "pass");
        let _ = ElementId(0);
    }
}
