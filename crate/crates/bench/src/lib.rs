//! Shared inputs for the benchmarks.

use plcpz_core::codec::encode_to_vec;
use plcpz_core::corpus::{random_text, repetitive_text};
use plcpz_core::factorizer::compress;
use plcpz_core::{build_index, Factorization, IndexBundle, MemoryBudget, Text};

pub struct Input {
    pub name: &'static str,
    pub text: Text,
    pub index: IndexBundle,
    pub coding: Factorization,
    pub coded: Vec<u8>,
}

fn input(name: &'static str, content: Vec<u8>) -> Input {
    let text = Text::from_content(content).expect("generated corpora are NUL-free");
    let index = build_index(&text);
    let (coding, _) = compress(&text, &index, 2, &MemoryBudget::unbounded()).expect("compression succeeds");
    let coded = encode_to_vec(&coding).expect("encoding succeeds");
    Input {
        name,
        text,
        index,
        coding,
        coded,
    }
}

/// One repetitive and one random text of `len` bytes.
pub fn inputs(len: usize) -> Vec<Input> {
    vec![
        input("repetitive", repetitive_text(1, len, 5).expect("valid rate")),
        input("random4", random_text(1, len, 4).expect("valid alphabet")),
    ]
}
