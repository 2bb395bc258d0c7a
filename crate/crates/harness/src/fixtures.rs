//! Fixture manifests: keyed state families written as text (keys with exact
//! probabilities followed by each state in the matrix text format), plus the
//! recorded parameters of the toy pad fixture.

use owsg_wb_core::owsg::KeyedStateFamily;
use owsg_wb_core::qstate::{parse_density, serialize_matrix};
use owsg_wb_core::{Error, Result};

/// Serializes a family manifest: a header, then one `key` line and one
/// state block per key.
pub fn family_manifest(name: &str, family: &KeyedStateFamily) -> String {
    let mut out = format!("fixture: {name}\nkeys: {}\n", family.len());
    for k in 0..family.len() {
        let word: Vec<String> = family
            .key_word(k)
            .iter()
            .map(|w| w.to_string())
            .collect();
        out.push_str(&format!(
            "key {} prob {:.16e}\n",
            word.join(" "),
            family.probability(k)
        ));
        let state = family.state(k);
        out.push_str(&serialize_matrix(state.shape(), state.matrix()));
    }
    out
}

/// Parses a family manifest back into keys, probabilities, and states.
pub fn parse_family_manifest(body: &str) -> Result<KeyedStateFamily> {
    let mut lines = body.lines().peekable();
    let header = lines
        .next()
        .ok_or_else(|| Error::ParseError("empty manifest".to_string()))?;
    if !header.starts_with("fixture:") {
        return Err(Error::ParseError(format!("bad header {header:?}")));
    }
    let count_line = lines
        .next()
        .ok_or_else(|| Error::ParseError("missing key count".to_string()))?;
    let count: usize = count_line
        .strip_prefix("keys:")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| Error::ParseError(format!("bad key count {count_line:?}")))?;
    let mut key_words = Vec::with_capacity(count);
    let mut probs = Vec::with_capacity(count);
    let mut states = Vec::with_capacity(count);
    let mut arity = 1;
    for _ in 0..count {
        let key_line = lines
            .next()
            .ok_or_else(|| Error::ParseError("missing key line".to_string()))?;
        let rest = key_line
            .strip_prefix("key ")
            .ok_or_else(|| Error::ParseError(format!("bad key line {key_line:?}")))?;
        let (word_part, prob_part) = rest
            .split_once(" prob ")
            .ok_or_else(|| Error::ParseError(format!("bad key line {key_line:?}")))?;
        let word: Vec<u32> = word_part
            .split_whitespace()
            .map(|w| {
                w.parse()
                    .map_err(|_| Error::ParseError(format!("bad key symbol {w:?}")))
            })
            .collect::<Result<_>>()?;
        arity = word.len();
        let prob: f64 = prob_part
            .trim()
            .parse()
            .map_err(|_| Error::ParseError(format!("bad probability {prob_part:?}")))?;
        // State block: the dims header plus one line per matrix row.
        let dims_line = lines
            .next()
            .ok_or_else(|| Error::ParseError("missing state block".to_string()))?;
        let mut block = String::from(dims_line);
        block.push('\n');
        let dim: usize = dims_line
            .strip_prefix("dims:")
            .map(|rest| {
                rest.split_whitespace()
                    .filter_map(|t| t.parse::<usize>().ok())
                    .product()
            })
            .ok_or_else(|| Error::ParseError(format!("bad dims line {dims_line:?}")))?;
        for _ in 0..dim {
            let row = lines
                .next()
                .ok_or_else(|| Error::ParseError("truncated state block".to_string()))?;
            block.push_str(row);
            block.push('\n');
        }
        key_words.push(word);
        probs.push(prob);
        states.push(parse_density(&block)?);
    }
    KeyedStateFamily::with_words(key_words, probs, states, arity)
}

/// Recorded parameters of the toy pad EFI fixture, written next to the
/// manifest so the acceptance threshold's provenance is auditable.
pub fn qpotp_fixture_record(
    kappa: usize,
    ell: usize,
    payload_qubits: usize,
    exact_distance: f64,
    threshold: f64,
) -> String {
    format!(
        "fixture: toy-qpotp\nkappa = {kappa}\nell = {ell}\nqubits_per_bit = 1\npayload_qubits = {payload_qubits}\n\
         exact_statistical_distance = {exact_distance:.16e}\nacceptance_threshold = {threshold:.16e}\n"
    )
}
