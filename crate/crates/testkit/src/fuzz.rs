//! Byte-level and structure-aware mutation of report documents.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use splitaudit_core::report::{from_json, to_json};
use splitaudit_core::Error;

use crate::generated_documents;

/// Outcome counts of a fuzz run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FuzzOutcomes {
    pub accepted: usize,
    pub malformed: usize,
    pub version_mismatch: usize,
}

pub fn mutate(rng: &mut ChaCha8Rng, bytes: &mut Vec<u8>) {
    const TOKENS: [&[u8]; 12] = [
        b"{",
        b"}",
        b"[",
        b"]",
        b",",
        b":",
        b"null",
        b"\"",
        b"1e999",
        b"-",
        b"\"kind\"",
        b"\xf0\x9f",
    ];
    for _ in 0..rng.random_range(1..=4) {
        if bytes.is_empty() {
            bytes.push(b'{');
        }
        let at = rng.random_range(0..bytes.len());
        match rng.random_range(0..5) {
            0 => bytes[at] = rng.random(),
            1 => bytes.truncate(at),
            2 => {
                let end = (at + rng.random_range(1..32)).min(bytes.len());
                bytes.drain(at..end);
            }
            3 => {
                let tok = TOKENS[rng.random_range(0..TOKENS.len())];
                bytes.splice(at..at, tok.iter().copied());
            }
            _ => {
                let from = rng.random_range(0..bytes.len());
                let end = (from + rng.random_range(1..64)).min(bytes.len());
                let chunk = bytes[from..end].to_vec();
                bytes.splice(at..at, chunk);
            }
        }
    }
}

/// Structure-aware mutation: keep valid JSON and the version, damage values.
pub fn mutate_value(rng: &mut ChaCha8Rng, v: &mut serde_json::Value) {
    use serde_json::Value;
    match v {
        Value::Object(map) if !map.is_empty() => {
            let keys: Vec<String> = map.keys().cloned().collect();
            let k = &keys[rng.random_range(0..keys.len())];
            if k == "schema_version" {
                return;
            }
            match rng.random_range(0..4) {
                0 => {
                    map.remove(k);
                }
                1 => {
                    map.insert(k.clone(), Value::Null);
                }
                _ => mutate_value(rng, map.get_mut(k).unwrap()),
            }
        }
        Value::Array(items) if !items.is_empty() => {
            let i = rng.random_range(0..items.len());
            mutate_value(rng, &mut items[i]);
        }
        Value::Number(_) => {
            *v = [
                serde_json::json!(-1),
                serde_json::json!(1.5),
                serde_json::json!(u64::MAX),
                serde_json::json!("7"),
            ][rng.random_range(0..4)]
            .clone()
        }
        Value::String(_) => {
            *v =
                [serde_json::json!(""), serde_json::json!(3), serde_json::json!("nope")][rng.random_range(0..3)].clone()
        }
        other => *other = serde_json::json!({}),
    }
}

/// Feed `cases` mutated documents to `from_json`. Panics on anything other
/// than a typed rejection, or if an accepted document fails to round-trip.
pub fn fuzz_from_json(cases: usize, seed: u64) -> FuzzOutcomes {
    let corpus: Vec<Vec<u8>> = (0..5).flat_map(generated_documents).map(|d| to_json(&d)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = FuzzOutcomes::default();
    for case in 0..cases {
        let seed = &corpus[rng.random_range(0..corpus.len())];
        let bytes = if case % 2 == 0 {
            let mut b = seed.clone();
            mutate(&mut rng, &mut b);
            b
        } else {
            let mut v: serde_json::Value = serde_json::from_slice(seed).unwrap();
            for _ in 0..rng.random_range(1..4) {
                mutate_value(&mut rng, &mut v);
            }
            serde_json::to_vec(&v).unwrap()
        };
        match from_json(&bytes) {
            Ok(doc) => {
                // anything accepted must survive a round trip
                assert_eq!(from_json(&to_json(&doc)).unwrap(), doc);
                out.accepted += 1;
            }
            Err(Error::MalformedDocument(_)) => out.malformed += 1,
            Err(Error::SchemaVersionMismatch { .. }) => out.version_mismatch += 1,
            Err(other) => panic!("untyped failure: {other}"),
        }
    }
    out
}

/// Round-trip every generated document for `seeds`; returns the kinds seen.
pub fn round_trip_generated(seeds: std::ops::Range<u64>) -> std::collections::BTreeSet<&'static str> {
    let mut kinds = std::collections::BTreeSet::new();
    for seed in seeds {
        for doc in generated_documents(seed) {
            let bytes = to_json(&doc);
            let back = from_json(&bytes).unwrap_or_else(|e| panic!("{}: {e}", doc.kind()));
            assert_eq!(back, doc, "{}", doc.kind());
            assert_eq!(to_json(&back), bytes, "{} re-serialization", doc.kind());
            kinds.insert(doc.kind());
        }
    }
    kinds
}
