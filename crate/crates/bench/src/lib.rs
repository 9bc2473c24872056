//! Inputs shared by the benchmarks.

use eatxt_core::synth::generate;
use eatxt_core::{emit, to_eaxml, Model, SchemaVersion};

pub const SIZES: [usize; 3] = [1_000, 5_000, 10_000];

/// A generated model together with its text and EAXML forms.
pub struct Input {
    pub model: Model,
    pub text: String,
    pub xml: String,
}

pub fn input(elements: usize) -> Input {
    let model = generate(0xEA57, elements, SchemaVersion::V2_2);
    let text = emit(&model);
    let xml = to_eaxml(&model).expect("generated models serialize");
    Input { model, text, xml }
}
