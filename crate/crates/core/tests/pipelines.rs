use selfrep_core::congruences::{lucas_check, super_check, SuperVerdict};
use selfrep_core::holonomic::{guess_integers, verify_rec_integers};
use selfrep_core::modular::{composed_form, level_family, p_level, LEVELS};
use selfrep_core::selfrep::{registry, solve};
use selfrep_core::sequences::family_terms;
use selfrep_core::Family;

#[test]
fn solved_equations_reproduce_generators() {
    for e in registry() {
        let f = solve(&e.equation, 40).unwrap().to_integers().unwrap();
        let want = family_terms(e.family, 39).unwrap();
        assert_eq!(f[..40], want[..], "{}", e.id);
    }
}

#[test]
fn guessed_recurrences_extrapolate() {
    for fam in [
        Family::U7,
        Family::F(2),
        Family::F(3),
        Family::F(4),
        Family::Gb,
        Family::G5,
    ] {
        let t = family_terms(fam, 79).unwrap();
        let outcome = guess_integers(&t, 3, 4).unwrap();
        let rec = outcome
            .found()
            .unwrap_or_else(|| panic!("{fam}: no recurrence"));
        let long = family_terms(fam, 300).unwrap();
        assert_eq!(verify_rec_integers(rec, &long), Ok(()), "{fam}");
    }
}

#[test]
fn solved_series_carry_supercongruences() {
    let e = registry()
        .into_iter()
        .find(|e| e.family == Family::U7)
        .unwrap();
    let u = solve(&e.equation, 300).unwrap().to_integers().unwrap();
    for p in [5u64, 7, 11, 13] {
        assert!(lucas_check(&u, p, 299).unwrap().passed(), "p = {p}");
        assert_eq!(
            super_check(&u, p, 2, 2, 299).unwrap(),
            SuperVerdict::Pass,
            "p = {p}"
        );
    }
}

#[test]
fn weight_two_forms_are_integral_and_match() {
    for &level in LEVELS.iter() {
        let lhs = p_level(level, 25).unwrap().series;
        let rhs = composed_form(level, 25).unwrap();
        assert!(rhs.is_integral(), "level {level}");
        assert_eq!(
            lhs.agreement_order(&rhs),
            Some(25),
            "level {level} via {}",
            level_family(level).unwrap()
        );
    }
}
