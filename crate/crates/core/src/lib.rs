//! Exact series kernels, sequence generators, congruence tests, recurrence
//! guessing, q-series checks, Legendre identities and AGM-type iterations
//! built around self-replicating functional equations
//! `t_L(z) f(φ_L(z)) = t_R(z) f(φ_R(z))`.

pub mod agm;
pub mod congruences;
pub mod holonomic;
pub mod legendre;
pub mod modular;
pub mod powerseries;
pub mod primepower;
pub mod search;
pub mod selfrep;
pub mod sequences;

pub use powerseries::{IntPoly, RationalFunction, SeriesError, TruncatedSeries};
pub use sequences::{Family, Route};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Series(#[from] powerseries::SeriesError),
    #[error(transparent)]
    Sequence(#[from] sequences::SequenceError),
    #[error(transparent)]
    SelfRep(#[from] selfrep::SelfRepError),
    #[error(transparent)]
    Congruence(#[from] congruences::CongruenceError),
    #[error(transparent)]
    Search(#[from] search::SearchError),
    #[error(transparent)]
    Holonomic(#[from] holonomic::HolonomicError),
    #[error(transparent)]
    Modular(#[from] modular::ModularError),
    #[error(transparent)]
    Agm(#[from] agm::AgmError),
    #[error(transparent)]
    Legendre(#[from] legendre::LegendreError),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Decimal-string serialization for big integers.
pub mod bigint_serde {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }

    pub mod vec {
        use num_bigint::BigInt;
        use serde::{Deserialize, Deserializer, Serializer};

        pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(|x| x.to_string()))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
            let raw = Vec::<String>::deserialize(d)?;
            raw.iter()
                .map(|s| s.parse().map_err(serde::de::Error::custom))
                .collect()
        }
    }
}

/// Primes up to and including `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            for j in (i * i..=n).step_by(i) {
                sieve[j] = false;
            }
        }
        i += 1;
    }
    (2..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn small_primes() {
        assert_eq!(super::primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
        assert!(super::primes_up_to(1).is_empty());
        assert_eq!(super::primes_up_to(50).len(), 15);
    }
}
