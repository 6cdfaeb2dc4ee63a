//! Formal q-expansions of the Hauptmoduln `z_ℓ`, the weight two forms
//! `P_ℓ = q d/dq log z_ℓ`, and the parametrizations `P_ℓ = f_ℓ(x(z_ℓ))`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use crate::powerseries::{ps_compose, ps_derive, ps_expand_rational, ps_mul, ps_recip};
use crate::powerseries::{IntPoly, RationalFunction, SeriesError, TruncatedSeries};
use crate::sequences::{family_terms, Family, SequenceError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModularError {
    #[error("unsupported level {0}; expected one of 2, 3, 4, 5, 7")]
    UnsupportedLevel(u32),
    #[error("order must be at least 1")]
    ZeroOrder,
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Sequence(#[from] SequenceError),
}

pub const LEVELS: [u32; 5] = [2, 3, 4, 5, 7];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum QKind {
    Z,
    P,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSeries {
    pub level: u32,
    pub kind: QKind,
    pub series: TruncatedSeries,
}

impl QSeries {
    pub fn exponent(&self) -> u32 {
        24 / (self.level - 1)
    }

    pub fn to_integers(&self) -> Option<Vec<BigInt>> {
        self.series.to_integers()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<String> = self.series.coeffs().iter().map(|c| c.to_string()).collect();
        serde_json::json!({
            "level": self.level,
            "kind": self.kind,
            "exponent": self.exponent(),
            "order": self.series.order(),
            "coeffs": coeffs,
        })
    }
}

fn check_level(level: u32, order: usize) -> Result<u32, ModularError> {
    if !LEVELS.contains(&level) {
        return Err(ModularError::UnsupportedLevel(level));
    }
    if order == 0 {
        return Err(ModularError::ZeroOrder);
    }
    Ok(24 / (level - 1))
}

/// `∏_{j ≤ order} ((1 − q^{ℓj}) / (1 − q^j))^e` through `q^order`.
fn eta_quotient(level: u32, e: u32, order: usize) -> Result<TruncatedSeries, SeriesError> {
    let mut acc = TruncatedSeries::one(order);
    for j in 1..=order {
        let mut den = TruncatedSeries::one(order);
        den.set_coeff(j, -BigRational::one());
        acc = ps_mul(&acc, &ps_recip(&den)?.pow(e));
        let lj = level as usize * j;
        if lj <= order {
            let mut num = TruncatedSeries::one(order);
            num.set_coeff(lj, -BigRational::one());
            acc = ps_mul(&acc, &num.pow(e));
        }
    }
    Ok(acc)
}

/// `z_ℓ = q ∏ ((1 − q^{ℓj}) / (1 − q^j))^{24/(ℓ−1)}` through `q^order`.
pub fn z_level(level: u32, order: usize) -> Result<QSeries, ModularError> {
    let e = check_level(level, order)?;
    let unit = eta_quotient(level, e, order - 1)?;
    Ok(QSeries {
        level,
        kind: QKind::Z,
        series: unit.shift_up(),
    })
}

/// `P_ℓ = q z_ℓ' / z_ℓ = 1 + q U'/U` with `z_ℓ = q U`.
pub fn p_level(level: u32, order: usize) -> Result<QSeries, ModularError> {
    let e = check_level(level, order)?;
    let unit = eta_quotient(level, e, order)?;
    let ratio = ps_mul(&ps_derive(&unit).shift_up(), &ps_recip(&unit)?);
    let series = &ratio.truncate(order) + &TruncatedSeries::one(order);
    Ok(QSeries {
        level,
        kind: QKind::P,
        series,
    })
}

/// Second route: `z_ℓ'` divided by `z_ℓ / q`.
pub fn p_level_from_z(level: u32, order: usize) -> Result<QSeries, ModularError> {
    let z = z_level(level, order + 1)?.series;
    let unit = TruncatedSeries::from_rationals(z.coeffs()[1..].to_vec(), order);
    let series = ps_mul(&ps_derive(&z), &ps_recip(&unit)?);
    Ok(QSeries {
        level,
        kind: QKind::P,
        series,
    })
}

/// The algebraic map `x(z)` of the parametrization at each level.
pub fn x_map(level: u32) -> Result<RationalFunction, ModularError> {
    let den: &[i64] = match level {
        2 => &[1, 64],
        3 => &[1, 27],
        4 => &[1, 16],
        5 => &[1, 22, 125],
        7 => &[1, 13, 49],
        _ => return Err(ModularError::UnsupportedLevel(level)),
    };
    Ok(RationalFunction::new(
        IntPoly::x_pow(1),
        IntPoly::from_i64(den),
    )?)
}

pub fn level_family(level: u32) -> Result<Family, ModularError> {
    match level {
        7 => Ok(Family::U7),
        2..=5 => Ok(Family::F(level as u8)),
        _ => Err(ModularError::UnsupportedLevel(level)),
    }
}

/// `f_ℓ(x(z_ℓ(q)))` through `q^order`.
pub fn composed_form(level: u32, order: usize) -> Result<TruncatedSeries, ModularError> {
    check_level(level, order)?;
    let f = TruncatedSeries::from_integers(&family_terms(level_family(level)?, order)?, order);
    let z = z_level(level, order)?.series;
    let x = ps_compose(&ps_expand_rational(&x_map(level)?, order)?, &z)?;
    Ok(ps_compose(&f, &x)?)
}

/// Largest `n ≤ order` through which `P_ℓ` and `f_ℓ(x(z_ℓ))` agree.
pub fn parametrization_check(level: u32, order: usize) -> Result<usize, ModularError> {
    let lhs = p_level(level, order)?.series;
    let rhs = composed_form(level, order)?;
    Ok(lhs.agreement_order(&rhs).unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn ints(s: &QSeries) -> Vec<i64> {
        s.to_integers()
            .unwrap()
            .iter()
            .map(|c| i64::try_from(c).unwrap())
            .collect()
    }

    fn sigma(n: usize) -> i64 {
        (1..=n)
            .filter(|&d| n.is_multiple_of(d))
            .map(|d| d as i64)
            .sum()
    }

    #[test]
    fn z7_leading_terms() {
        // q (1-q)^{-4} (1-q^2)^{-4} through q^3
        assert_eq!(ints(&z_level(7, 3).unwrap()), vec![0, 1, 4, 14]);
    }

    #[test]
    fn normalization() {
        for l in LEVELS {
            let z = z_level(l, 8).unwrap();
            assert!(z.series.coeff(0).is_zero());
            assert!(z.series.coeff(1).is_one());
            let p = p_level(l, 8).unwrap();
            assert!(p.series.coeff(0).is_one());
        }
        assert_eq!(ints(&z_level(4, 1).unwrap()), vec![0, 1]);
    }

    #[test]
    fn rejects_bad_level() {
        assert_eq!(
            z_level(6, 5).unwrap_err(),
            ModularError::UnsupportedLevel(6)
        );
        assert_eq!(
            p_level(9, 5).unwrap_err(),
            ModularError::UnsupportedLevel(9)
        );
        assert_eq!(z_level(7, 0).unwrap_err(), ModularError::ZeroOrder);
    }

    #[test]
    fn p_matches_divisor_sums() {
        for l in LEVELS {
            let e = (24 / (l - 1)) as i64;
            let n = 30;
            let want: Vec<i64> = (0..=n)
                .map(|k| {
                    if k == 0 {
                        1
                    } else {
                        let tail = if k % l as usize == 0 {
                            l as i64 * sigma(k / l as usize)
                        } else {
                            0
                        };
                        e * (sigma(k) - tail)
                    }
                })
                .collect();
            assert_eq!(ints(&p_level(l, n).unwrap()), want, "level {l}");
        }
    }

    #[test]
    fn two_p_routes_agree() {
        for l in LEVELS {
            assert_eq!(p_level(l, 12).unwrap(), p_level_from_z(l, 12).unwrap());
        }
        assert!(p_level(7, 10).unwrap().to_integers().is_some());
    }

    #[test]
    fn parametrizations_small_order() {
        for l in LEVELS {
            assert_eq!(parametrization_check(l, 15).unwrap(), 15, "level {l}");
        }
    }

    #[test]
    fn wrong_map_is_detected() {
        let f = TruncatedSeries::from_integers(&family_terms(Family::U7, 10).unwrap(), 10);
        let z = z_level(7, 10).unwrap().series;
        let bad = RationalFunction::from_i64(&[0, 1], &[1, 13, 48]).unwrap();
        let x = ps_compose(&ps_expand_rational(&bad, 10).unwrap(), &z).unwrap();
        let rhs = ps_compose(&f, &x).unwrap();
        assert!(
            p_level(7, 10)
                .unwrap()
                .series
                .agreement_order(&rhs)
                .unwrap()
                < 10
        );
    }

    #[test]
    fn json_export() {
        let js = z_level(3, 4).unwrap().to_json();
        assert_eq!(js["exponent"], 12);
        assert_eq!(js["coeffs"][1], "1");
        assert_eq!(js["kind"], "z");
    }
}
