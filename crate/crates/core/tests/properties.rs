//! Property tests over randomly generated instances: lattice laws, diagram
//! round-trips, measure invariants, and scan-order independence.

use proptest::prelude::*;

use num_rational::BigRational;
use num_traits::One;
use omlcause_core::causality::{check_common_cause, correlated_pairs, find_common_causes};
use omlcause_core::extend::dyadic_refine;
use omlcause_core::greechie::{parse_diagram, paste, GreechieDiagram};
use omlcause_core::lattice::Lattice;
use omlcause_core::states::{
    is_faithful, measure_from_atom_weights, phi_atoms, q_decompose, random_state, Measure,
};

fn small_lattice() -> impl Strategy<Value = Lattice> {
    prop_oneof![
        (1usize..=5).prop_map(|atoms| {
            let names: Vec<String> = (0..atoms)
                .map(|i| ((b'p' + i as u8) as char).to_string())
                .collect();
            Lattice::boolean(names).unwrap()
        }),
        (1usize..=6).prop_map(|n| Lattice::mo(n).unwrap()),
        prop_oneof![
            Just("block: a b c\nblock: c d e"),
            Just("block: a b c\nblock: c d e\nblock: e f g"),
            Just("block: a b c\nblock: c d e\nblock: c f g"),
        ]
        .prop_map(|text| paste(&parse_diagram(text).unwrap()).unwrap()),
    ]
}

/// Chain-shaped diagrams, valid by construction: blocks of 3..=4 atoms,
/// each optionally sharing its first atom with the previous block's last.
fn chain_diagram() -> impl Strategy<Value = GreechieDiagram> {
    proptest::collection::vec((3usize..=4, proptest::bool::ANY), 1..=3).prop_map(|specs| {
        let mut text = String::new();
        let mut last_atom: Option<String> = None;
        for (i, (size, share)) in specs.iter().enumerate() {
            let mut labels: Vec<String> = Vec::new();
            if *share {
                if let Some(prev) = &last_atom {
                    labels.push(prev.clone());
                }
            }
            let mut j = 0;
            while labels.len() < *size {
                labels.push(format!("x{i}_{j}"));
                j += 1;
            }
            last_atom = Some(labels.last().unwrap().clone());
            text.push_str(&format!("block: {}\n", labels.join(" ")));
        }
        parse_diagram(&text).unwrap()
    })
}

fn sampled(lattice: &Lattice, seed: u64) -> Measure {
    random_state(lattice, seed, 64).expect("faithful state")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn de_morgan_and_compatibility_laws(lattice in small_lattice()) {
        for x in lattice.elements() {
            for y in lattice.elements() {
                prop_assert_eq!(
                    lattice.meet(x, y),
                    lattice.ortho(lattice.join(lattice.ortho(x), lattice.ortho(y)))
                );
                prop_assert_eq!(lattice.is_compatible(x, y), lattice.is_compatible(y, x));
                if lattice.leq(x, y) {
                    prop_assert!(lattice.is_compatible(x, y));
                }
            }
        }
    }

    #[test]
    fn diagram_round_trip_and_paste_contract(diagram in chain_diagram()) {
        let text = diagram.to_string();
        prop_assert_eq!(&parse_diagram(&text).unwrap(), &diagram);

        let lattice = paste(&diagram).unwrap();
        prop_assert!(lattice.verify_orthomodular().is_ok());
        let atom_names: Vec<String> = lattice
            .atoms()
            .iter()
            .map(|&a| lattice.element_name(a))
            .collect();
        prop_assert_eq!(atom_names, diagram.atom_universe().to_vec());
    }

    #[test]
    fn sampled_states_validate_and_are_faithful(lattice in small_lattice(), seed in 0u64..1000) {
        let measure = sampled(&lattice, seed);
        prop_assert!(is_faithful(&lattice, &measure));
        // Monotone under the order.
        for x in lattice.elements() {
            for y in lattice.elements() {
                if lattice.leq(x, y) {
                    prop_assert!(measure.value(x) <= measure.value(y));
                }
            }
        }
        // Faithful phi-atoms coincide with the atoms.
        prop_assert_eq!(phi_atoms(&lattice, &measure), lattice.atoms());
    }

    #[test]
    fn correlations_are_strict_and_search_is_order_free(seed in 0u64..500) {
        let lattice = Lattice::boolean(["p", "q", "r", "s"]).unwrap();
        let measure = sampled(&lattice, seed);
        let witnesses = correlated_pairs(&lattice, &measure);
        for w in &witnesses {
            prop_assert!(w.lhs > w.rhs);
            prop_assert!(w.a < w.b);
        }
        if let Some(w) = witnesses.first() {
            let forward = find_common_causes(&lattice, &measure, w.a, w.b, true);
            let mut reversed: Vec<_> = lattice
                .elements()
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .filter(|&c| c != w.a && c != w.b)
                .filter_map(|c| check_common_cause(&lattice, &measure, w.a, w.b, c).ok())
                .collect();
            reversed.reverse();
            prop_assert_eq!(forward, reversed);
        }
    }

    #[test]
    fn q_decomposition_reconstructs_on_random_boolean_states(
        atoms in 1usize..=5,
        seed in 0u64..1000,
    ) {
        let names: Vec<String> = (0..atoms)
            .map(|i| ((b'p' + i as u8) as char).to_string())
            .collect();
        let lattice = Lattice::boolean(names).unwrap();
        let measure = sampled(&lattice, seed);
        for q in lattice.atoms() {
            let d = q_decompose(&lattice, &measure, q).unwrap();
            let rest = BigRational::one() - &d.alpha;
            for x in lattice.elements() {
                let phi2_x = d
                    .phi2
                    .as_ref()
                    .map(|m| m.value(x))
                    .unwrap_or_default();
                prop_assert_eq!(&d.alpha * d.phi1.value(x) + &rest * phi2_x, measure.value(x));
            }
        }
    }

    #[test]
    fn refinement_preserves_correlation_gaps(seed in 0u64..500, k in 0u32..=2) {
        let lattice = Lattice::boolean(["p", "q", "r"]).unwrap();
        let measure = sampled(&lattice, seed);
        let refinement = dyadic_refine(&lattice, &measure, k, None).unwrap();
        let target = refinement.embedding.target();
        for w in correlated_pairs(&lattice, &measure) {
            let (ha, hb) = (refinement.embedding.apply(w.a), refinement.embedding.apply(w.b));
            let lhs = refinement.refined.value(target.meet(ha, hb));
            let rhs = refinement.refined.value(ha) * refinement.refined.value(hb);
            prop_assert_eq!(&lhs - &rhs, w.gap());
        }
        // Weights a uniform split never invents or destroys faithfulness.
        prop_assert!(is_faithful(target, &refinement.refined));
    }

    #[test]
    fn atom_weight_extension_agrees_with_direct_summation(
        raw in proptest::collection::vec(1u32..=100, 3),
    ) {
        let lattice = Lattice::boolean(["p", "q", "r"]).unwrap();
        let total: u32 = raw.iter().sum();
        let weights: Vec<BigRational> = raw
            .iter()
            .map(|&w| BigRational::new(w.into(), total.into()))
            .collect();
        let measure = measure_from_atom_weights(&lattice, weights.clone()).unwrap();
        for x in lattice.elements() {
            let direct: BigRational = (0..3)
                .filter(|i| x.0 >> i & 1 == 1)
                .map(|i| weights[i].clone())
                .sum();
            prop_assert_eq!(measure.value(x), direct);
        }
    }
}
