//! Replays the fuzz corpus and random mutations of it through the config
//! entry points on the stable toolchain. Parsing must never panic.

use std::path::Path;

use attoscatter::cli::parse_config_str;
use attoscatter::UnitsContext;
use proptest::prelude::*;

fn exercise(text: &str) {
    if let Ok(cfg) = parse_config_str(text) {
        if let Ok(model) = cfg.build_model(&UnitsContext::default()) {
            let _ = cfg.build_state(&model);
        }
    }
}

fn seeds() -> Vec<String> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    let mut out = Vec::new();
    for target in std::fs::read_dir(root).unwrap() {
        for entry in std::fs::read_dir(target.unwrap().path()).unwrap() {
            out.push(std::fs::read_to_string(entry.unwrap().path()).unwrap());
        }
    }
    out.sort();
    out
}

#[test]
fn corpus_seeds_do_not_panic() {
    let seeds = seeds();
    assert!(seeds.len() >= 5);
    for s in &seeds {
        exercise(s);
    }
}

#[derive(Debug, Clone)]
enum Edit {
    Delete(usize, usize),
    Insert(usize, String),
    Replace(usize, char),
}

fn edit() -> impl Strategy<Value = Edit> {
    prop_oneof![
        (any::<usize>(), 1usize..20).prop_map(|(p, n)| Edit::Delete(p, n)),
        (any::<usize>(), "[-0-9.e\\[\\]={}\",a-zA-Z_ \n]{1,12}")
            .prop_map(|(p, s)| Edit::Insert(p, s)),
        (any::<usize>(), any::<char>()).prop_map(|(p, c)| Edit::Replace(p, c)),
    ]
}

fn apply(text: &str, edits: &[Edit]) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    for e in edits {
        let len = chars.len().max(1);
        match e {
            Edit::Delete(p, n) => {
                let start = p % len;
                let end = (start + n).min(chars.len());
                if start < end {
                    chars.drain(start..end);
                }
            }
            Edit::Insert(p, s) => {
                let at = p % (chars.len() + 1);
                chars.splice(at..at, s.chars());
            }
            Edit::Replace(p, c) => {
                if !chars.is_empty() {
                    chars[p % len] = *c;
                }
            }
        }
    }
    chars.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mutated_seeds_do_not_panic(which in any::<prop::sample::Index>(), edits in prop::collection::vec(edit(), 1..6)) {
        let seeds = seeds();
        exercise(&apply(&seeds[which.index(seeds.len())], &edits));
    }

    #[test]
    fn arbitrary_text_does_not_panic(text in "\\PC{0,200}") {
        exercise(&text);
    }
}
