//! Deterministic names for compiler-generated atoms. Every generated atom is
//! `@<family>.<segment>…` where segments are indices or embedded names, so
//! outputs are reproducible byte for byte and never collide with user atoms.

use crate::model::Atom;

#[derive(Debug, Clone, Copy)]
pub enum Seg<'a> {
    Idx(usize),
    Name(&'a str),
}

/// Families each generator is allowed to mint. The first entry of each tuple
/// is the generator id used in diagnostics.
const FAMILIES: &[(&str, &[&str])] = &[
    ("t6", &["neg"]),
    ("l7", &["prime", "plus", "minus", "x", "g", "c0", "c1"]),
    ("l8", &["neg", "g"]),
    ("t20", &["plus", "minus", "hash", "op", "x", "c"]),
    ("t22b", &["plus", "minus", "hash", "op", "x", "c"]),
    ("t22l", &["plus", "minus", "hash", "op", "x", "c"]),
    ("t23", &["f", "fdone"]),
    ("copy", &["hashcopy"]),
    ("unsat3cnf", &["d"]),
];

/// Mint a generated atom. Injective per `(family, segments)`.
pub fn fresh_atom(scheme: &str, family: &str, segments: &[Seg<'_>]) -> Result<Atom, String> {
    let allowed = FAMILIES
        .iter()
        .find(|(s, _)| *s == scheme)
        .map(|(_, fams)| fams.contains(&family))
        .unwrap_or(false);
    if !allowed {
        return Err(format!("family `{family}` is not declared for `{scheme}`"));
    }
    let mut name = format!("@{family}");
    for seg in segments {
        match seg {
            Seg::Idx(i) => name.push_str(&format!(".{i}")),
            Seg::Name(s) => name.push_str(&format!(".{s}")),
        }
    }
    Atom::new(&name).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_deterministic_per_family_and_segments() {
        assert_eq!(
            fresh_atom("t6", "neg", &[Seg::Name("p")]).unwrap().name(),
            "@neg.p"
        );
        assert_eq!(
            fresh_atom("l7", "x", &[Seg::Idx(0), Seg::Idx(2), Seg::Idx(1)])
                .unwrap()
                .name(),
            "@x.0.2.1"
        );
        assert_eq!(fresh_atom("t23", "f", &[Seg::Idx(3)]).unwrap().name(), "@f.3");
        assert_eq!(fresh_atom("l7", "g", &[]).unwrap().name(), "@g");
        // Nested generated names stay parseable.
        assert_eq!(
            fresh_atom("t20", "plus", &[Seg::Name("@neg.p")]).unwrap().name(),
            "@plus.@neg.p"
        );
    }

    #[test]
    fn families_are_scoped_per_generator() {
        assert!(fresh_atom("t6", "plus", &[Seg::Name("p")]).is_err());
        assert!(fresh_atom("nope", "neg", &[Seg::Name("p")]).is_err());
    }
}
