use omcs::sign::{parse_system, serialize_system};
use omcs::{ElementSet, Sign, SignSystem, SignVector};
use proptest::prelude::*;

fn token(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('+'), Just('-'), Just('0')], n).prop_map(|v| v.into_iter().collect())
}

fn vector(n: usize) -> impl Strategy<Value = SignVector> {
    token(n).prop_map(|t| SignVector::parse_token(&t).unwrap())
}

fn pair() -> impl Strategy<Value = (SignVector, SignVector)> {
    (1usize..12).prop_flat_map(|n| (vector(n), vector(n)))
}

fn triple() -> impl Strategy<Value = (SignVector, SignVector, SignVector)> {
    (1usize..12).prop_flat_map(|n| (vector(n), vector(n), vector(n)))
}

// Character-level oracles.
fn compose_chars(x: &str, y: &str) -> String {
    x.chars()
        .zip(y.chars())
        .map(|(a, b)| if a == '0' { b } else { a })
        .collect()
}

fn sep_chars(x: &str, y: &str) -> Vec<usize> {
    x.chars()
        .zip(y.chars())
        .enumerate()
        .filter(|(_, (a, b))| (*a == '+' && *b == '-') || (*a == '-' && *b == '+'))
        .map(|(i, _)| i)
        .collect()
}

fn below_chars(x: &str, y: &str) -> bool {
    x.chars().zip(y.chars()).all(|(a, b)| a == '0' || a == b)
}

proptest! {
    #[test]
    fn composition_matches_oracle((x, y) in pair()) {
        let got = x.compose(&y).unwrap().to_token();
        prop_assert_eq!(got, compose_chars(&x.to_token(), &y.to_token()));
    }

    #[test]
    fn separator_matches_oracle((x, y) in pair()) {
        prop_assert_eq!(x.sep(&y).to_vec(), sep_chars(&x.to_token(), &y.to_token()));
        prop_assert_eq!(x.sep(&y), y.sep(&x));
    }

    #[test]
    fn conformal_order_matches_oracle((x, y) in pair()) {
        prop_assert_eq!(x.below(&y), below_chars(&x.to_token(), &y.to_token()));
    }

    #[test]
    fn composition_is_associative((x, y, z) in triple()) {
        prop_assert_eq!(x.circ(&y).circ(&z), x.circ(&y.circ(&z)));
    }

    #[test]
    fn composition_is_idempotent_and_below((x, y) in pair()) {
        prop_assert_eq!(x.circ(&x), x);
        prop_assert!(x.below(&x.circ(&y)));
        prop_assert_eq!(x.circ(&y).support(), x.support().union(y.support()));
    }

    #[test]
    fn negation_is_an_involution((x, _y) in pair()) {
        prop_assert_eq!(-(-x), x);
        prop_assert_eq!((-x).plus_set(), x.minus_set());
    }

    #[test]
    fn token_round_trip((x, _y) in pair()) {
        prop_assert_eq!(SignVector::parse_token(&x.to_token()), Some(x));
    }

    #[test]
    fn canonical_order_is_lexicographic_on_tokens((x, y) in pair()) {
        prop_assert_eq!(x.cmp(&y), x.to_token().cmp(&y.to_token()));
    }

    #[test]
    fn sv_round_trip(tokens in (1usize..8).prop_flat_map(|n| proptest::collection::btree_set(token(n), 1..20))) {
        let text: String = tokens.iter().rev().map(|t| format!("{t}\n")).collect();
        let (system, warnings) = parse_system(&text).unwrap();
        prop_assert!(warnings.is_empty());
        let canonical = serialize_system(&system);
        let expected: String = tokens.iter().map(|t| format!("{t}\n")).collect();
        prop_assert_eq!(&canonical, &expected);
        let (again, _) = parse_system(&canonical).unwrap();
        prop_assert_eq!(again, system);
    }

    #[test]
    fn deletion_drops_coordinates((x, _y) in pair(), bits in any::<u64>()) {
        let removed = ElementSet(bits & ((1u64 << x.len()) - 1));
        let d = x.delete(removed);
        let expected: String = x.to_token().chars().enumerate().filter(|(i, _)| !removed.contains(*i)).map(|(_, c)| c).collect();
        prop_assert_eq!(d.to_token(), expected);
    }
}

#[test]
fn mismatched_lengths_are_rejected() {
    let x = SignVector::parse_token("+-").unwrap();
    let y = SignVector::parse_token("+-0").unwrap();
    assert!(x.compose(&y).is_err());
    assert!(x.separator(&y).is_err());
    assert!(x.conforms_below(&y).is_err());
}

#[test]
fn sign_multiplication_table() {
    use Sign::*;
    for (a, b, c) in [
        (Plus, Plus, Plus),
        (Plus, Minus, Minus),
        (Minus, Minus, Plus),
        (Zero, Minus, Zero),
    ] {
        assert_eq!(a * b, c);
        assert_eq!(b * a, c);
    }
}

#[test]
fn parse_errors_carry_positions() {
    let err = parse_system("elements: a b\n++\n+x\n").unwrap_err().to_string();
    assert!(err.contains("line 3") && err.contains("column 2"), "{err}");
    let err = parse_system("++\n+++\n").unwrap_err().to_string();
    assert!(err.contains("line 2"), "{err}");
    assert!(parse_system("# nothing\n").is_err());
}

#[test]
fn duplicates_produce_warnings() {
    let (system, warnings) = parse_system("+-\n-+\n+-\n").unwrap();
    assert_eq!(system.len(), 2);
    assert_eq!(warnings.len(), 1);
    assert_eq!(warnings[0].line, 3);
}

#[test]
fn named_ground_sets_resolve_names_and_ids() {
    let (system, _) = parse_system("elements: a b c\n+-0\n").unwrap();
    let ground = system.ground();
    assert_eq!(ground.lookup("b"), Some(1));
    assert_eq!(ground.lookup("3"), Some(2));
    assert_eq!(ground.lookup("4"), None);
    let unnamed = SignSystem::from_vectors(2, [SignVector::parse_token("+-").unwrap()]).unwrap();
    assert_eq!(unnamed.ground().name(0), "1");
}
