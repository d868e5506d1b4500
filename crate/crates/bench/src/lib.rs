//! Shared instance builders for the benchmarks.

use omlcause_core::greechie::{parse_diagram, paste};
use omlcause_core::lattice::Lattice;
use omlcause_core::states::{random_state, Measure};

pub fn boolean(atoms: usize) -> Lattice {
    let names: Vec<String> = (0..atoms)
        .map(|i| ((b'p' + i as u8) as char).to_string())
        .collect();
    Lattice::boolean(names).expect("bench lattice")
}

pub fn chain3() -> Lattice {
    paste(&parse_diagram("block: a b c\nblock: c d e\nblock: e f g").expect("parses"))
        .expect("pastes")
}

pub fn state(lattice: &Lattice, seed: u64) -> Measure {
    random_state(lattice, seed, 64).expect("faithful state")
}
