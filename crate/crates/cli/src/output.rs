//! Report assembly: JSON (the default, byte-stable across runs) and the
//! `--pretty` table renderings.

use serde_json::{json, Value};

use omlcause_core::causality::{
    anticorrelated_pairs, certificate_json, correlated_pairs, find_common_causes,
    is_common_cause_closed, witness_json, Closedness, CommonCauseCertificate, CorrelationWitness,
};
use omlcause_core::extend::ExtensionOutcome;
use omlcause_core::lattice::Lattice;
use omlcause_core::ratio::{format_ratio, ratio_json};
use omlcause_core::states::{
    atom_weights_json, classify_atomicity, is_faithful, measure_json, phi_atoms, Measure,
    QDecomposition,
};

/// Everything `analyze` reports, gathered once.
pub struct Analysis {
    pub family: String,
    pub elements: usize,
    pub atom_names: Vec<String>,
    pub faithful: bool,
    pub atomicity: &'static str,
    pub phi_atom_names: Vec<String>,
    pub correlations: Vec<(CorrelationWitness, Vec<CommonCauseCertificate>)>,
    pub anticorrelated: usize,
    pub closedness: Closedness,
}

pub fn analyze(lattice: &Lattice, family: &str, measure: &Measure) -> Analysis {
    let correlations = correlated_pairs(lattice, measure)
        .into_iter()
        .map(|w| {
            let causes = find_common_causes(lattice, measure, w.a, w.b, false);
            (w, causes)
        })
        .collect();
    Analysis {
        family: family.to_string(),
        elements: lattice.n(),
        atom_names: lattice
            .atoms()
            .iter()
            .map(|&a| lattice.element_name(a))
            .collect(),
        faithful: is_faithful(lattice, measure),
        atomicity: classify_atomicity(lattice, measure).as_str(),
        phi_atom_names: phi_atoms(lattice, measure)
            .iter()
            .map(|&a| lattice.element_name(a))
            .collect(),
        correlations,
        anticorrelated: anticorrelated_pairs(lattice, measure).len(),
        closedness: is_common_cause_closed(lattice, measure),
    }
}

impl Analysis {
    pub fn closed(&self) -> bool {
        self.closedness.is_closed()
    }

    pub fn to_json(&self, lattice: &Lattice, measure: &Measure) -> Value {
        let correlations: Vec<Value> = self
            .correlations
            .iter()
            .map(|(w, causes)| {
                let mut v = witness_json(lattice, w);
                let causes_json: Vec<Value> = causes
                    .iter()
                    .map(|c| certificate_json(lattice, c))
                    .collect();
                let nontrivial = causes.iter().filter(|c| c.nontrivial).count();
                v["common_causes"] = Value::Array(causes_json);
                v["nontrivial_cause_count"] = json!(nontrivial);
                v
            })
            .collect();
        let closedness = match &self.closedness {
            Closedness::Closed => json!({"closed": true}),
            Closedness::NotClosed { witness } => json!({
                "closed": false,
                "witness": witness_json(lattice, witness),
            }),
        };
        json!({
            "lattice": {
                "family": self.family,
                "elements": self.elements,
                "atoms": self.atom_names,
            },
            "measure": {
                "atom_weights": atom_weights_json(lattice, measure),
                "faithful": self.faithful,
                "atomicity": self.atomicity,
            },
            "phi_atoms": self.phi_atom_names,
            "correlations": correlations,
            "anticorrelated_pair_count": self.anticorrelated,
            "closedness": closedness,
        })
    }

    pub fn to_pretty(&self, lattice: &Lattice, measure: &Measure) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "lattice     {} ({} elements; atoms: {})\n",
            self.family,
            self.elements,
            self.atom_names.join(", ")
        ));
        let weights: Vec<String> = lattice
            .atoms()
            .iter()
            .map(|&a| {
                format!(
                    "{} = {}",
                    lattice.element_name(a),
                    format_ratio(&measure.value(a))
                )
            })
            .collect();
        out.push_str(&format!("measure     {}\n", weights.join(", ")));
        out.push_str(&format!(
            "            faithful: {}; atomicity: {}\n",
            if self.faithful { "yes" } else { "no" },
            self.atomicity
        ));
        out.push_str(&format!("phi-atoms   {}\n", self.phi_atom_names.join(", ")));
        out.push_str(&format!(
            "correlated  {} pair(s); anticorrelated {} pair(s)\n",
            self.correlations.len(),
            self.anticorrelated
        ));
        for (w, causes) in &self.correlations {
            let nontrivial = causes.iter().filter(|c| c.nontrivial).count();
            out.push_str(&format!(
                "  ({}, {}): {} > {}, causes: {} ({} nontrivial)\n",
                lattice.element_name(w.a),
                lattice.element_name(w.b),
                format_ratio(&w.lhs),
                format_ratio(&w.rhs),
                causes.len(),
                nontrivial,
            ));
        }
        match &self.closedness {
            Closedness::Closed => out.push_str("closedness  closed\n"),
            Closedness::NotClosed { witness } => out.push_str(&format!(
                "closedness  NOT closed; unexplained pair ({}, {})\n",
                lattice.element_name(witness.a),
                lattice.element_name(witness.b)
            )),
        }
        out
    }
}

pub fn qdecomposition_json(lattice: &Lattice, d: &QDecomposition) -> Value {
    json!({
        "q": lattice.element_name(d.q),
        "alpha": ratio_json(&d.alpha),
        "phi1": measure_json(lattice, &d.phi1),
        "phi2": d.phi2.as_ref().map(|m| measure_json(lattice, m)).unwrap_or(Value::Null),
        "degenerate": d.phi2.is_none(),
    })
}

pub fn qdecomposition_pretty(lattice: &Lattice, d: &QDecomposition) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "q = {}, alpha = {}\n",
        lattice.element_name(d.q),
        format_ratio(&d.alpha)
    ));
    match &d.phi2 {
        None => out.push_str("degenerate: alpha = 1, no second component\n"),
        Some(phi2) => {
            out.push_str("element            phi1      phi2\n");
            for x in lattice.elements() {
                out.push_str(&format!(
                    "{:<18} {:<9} {}\n",
                    lattice.element_name(x),
                    format_ratio(&d.phi1.value(x)),
                    format_ratio(&phi2.value(x))
                ));
            }
        }
    }
    out
}

pub fn extension_json(outcome: &ExtensionOutcome, depth: u32) -> Value {
    let embedding = &outcome.refinement.embedding;
    let target = embedding.target();
    json!({
        "embedding": {
            "depth": depth,
            "source_elements": embedding.source().n(),
            "target_elements": target.n(),
            "verified": true,
        },
        "refined_pair": [
            target.element_name(outcome.refined_a),
            target.element_name(outcome.refined_b),
        ],
        "certificate": outcome
            .certificate
            .as_ref()
            .map(|c| certificate_json(target, c))
            .unwrap_or(Value::Null),
    })
}

pub fn extension_pretty(outcome: &ExtensionOutcome, depth: u32) -> String {
    let embedding = &outcome.refinement.embedding;
    let target = embedding.target();
    let mut out = String::new();
    out.push_str(&format!(
        "refinement  depth {depth}: {} -> {} elements (embedding verified)\n",
        embedding.source().n(),
        target.n()
    ));
    out.push_str(&format!(
        "pair        ({}, {})\n",
        target.element_name(outcome.refined_a),
        target.element_name(outcome.refined_b)
    ));
    match &outcome.certificate {
        None => out.push_str("certificate none found\n"),
        Some(c) => out.push_str(&format!(
            "certificate {} with phi(c) = {}\n",
            target.element_name(c.c),
            format_ratio(&c.phi_c)
        )),
    }
    out
}
