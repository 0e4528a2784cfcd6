//! Named θ used across tests, the CLI and the demo.

use crate::certified::ThetaSpec;

#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub spec: &'static str,
    pub note: &'static str,
}

impl CorpusEntry {
    pub fn theta(&self) -> ThetaSpec {
        self.spec.parse().expect("corpus specs parse")
    }
}

pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry { name: "sqrt2-sqrt3", spec: "sqrt:2,sqrt:3", note: "quadratic pair, badly approximable" },
    CorpusEntry {
        name: "plastic",
        spec: "alg:1,0,-1,-1@[1.3,1.4],alg:1,-2,1,-1@[1.7,1.8]",
        note: "ρ and ρ², ρ the real root of x^3 - x - 1",
    },
    CorpusEntry {
        name: "cube-roots",
        spec: "alg:1,0,0,-2@[1.25,1.26],alg:1,0,0,-3@[1.44,1.45]",
        note: "2^(1/3) and 3^(1/3)",
    },
    CorpusEntry { name: "liouville", spec: "lac:10@fact,lac:2@fact", note: "sums of b^-k! for b = 10 and b = 2" },
    CorpusEntry { name: "golden", spec: "alg:1,-1,-1@[1.6,1.7]", note: "n = 1, the golden ratio" },
    CorpusEntry { name: "sqrt2", spec: "sqrt:2", note: "n = 1" },
    CorpusEntry { name: "mixed", spec: "sqrt:2,rat:1/3,lac:2@1,3,9,...", note: "one rational and one lacunary component" },
    CorpusEntry { name: "rational", spec: "rat:1/2,rat:1/3", note: "rationally dependent, records terminate" },
];

pub fn lookup(name: &str) -> Option<&'static CorpusEntry> {
    CORPUS.iter().find(|e| e.name == name)
}

/// A corpus name or a literal spec.
pub fn resolve(s: &str) -> Result<ThetaSpec, crate::certified::SpecError> {
    match lookup(s) {
        Some(e) => Ok(e.theta()),
        None => s.parse(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse_and_roundtrip() {
        for e in CORPUS {
            let t = e.theta();
            assert_eq!(t.to_string().parse::<ThetaSpec>().unwrap(), t, "{}", e.name);
        }
        assert_eq!(resolve("plastic").unwrap(), lookup("plastic").unwrap().theta());
        assert!(resolve("sqrt:7").is_ok());
        assert!(resolve("nope").is_err());
    }
}
