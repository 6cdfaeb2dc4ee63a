//! Arithmetic modulo a prime power `p^e` below 2^62, with binomial
//! coefficients from unit parts of factorials and p-adic valuations.

/// Modulus `p^e` with `p^e < 2^62`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimePower {
    pub p: u64,
    pub e: u32,
    pub modulus: u64,
}

impl PrimePower {
    /// `None` if `p^e` does not fit below 2^62.
    pub fn new(p: u64, e: u32) -> Option<Self> {
        let mut m: u64 = 1;
        for _ in 0..e {
            m = m.checked_mul(p)?;
            if m >= 1 << 62 {
                return None;
            }
        }
        Some(Self { p, e, modulus: m })
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    pub fn reduce_i64(&self, a: i64) -> u64 {
        a.rem_euclid(self.modulus as i64) as u64
    }

    pub fn pow(&self, mut base: u64, mut exp: u64) -> u64 {
        let mut acc = 1 % self.modulus;
        base %= self.modulus;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Inverse of a unit modulo `p^e`.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let (mut r0, mut r1) = (self.modulus as i128, (a % self.modulus) as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        if r0 != 1 {
            return None;
        }
        Some(s0.rem_euclid(self.modulus as i128) as u64)
    }
}

/// Exponent of `p` in `n`, with `n > 0`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    let mut v = 0;
    while n.is_multiple_of(p) {
        n /= p;
        v += 1;
    }
    v
}

/// Binomial coefficients modulo `p^e` for arguments up to a fixed bound.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    pub pp: PrimePower,
    unit_fact: Vec<u64>,
    inv_unit_fact: Vec<u64>,
    val_fact: Vec<u64>,
}

impl BinomialTable {
    pub fn new(pp: PrimePower, n_max: usize) -> Self {
        let mut unit_fact = Vec::with_capacity(n_max + 1);
        let mut val_fact = Vec::with_capacity(n_max + 1);
        unit_fact.push(1 % pp.modulus);
        val_fact.push(0);
        for i in 1..=n_max as u64 {
            let v = valuation(i, pp.p);
            let unit = i / pp.p.pow(v);
            let prev = *unit_fact.last().unwrap();
            unit_fact.push(pp.mul(prev, unit % pp.modulus));
            val_fact.push(val_fact.last().unwrap() + v as u64);
        }
        let inv_unit_fact = unit_fact
            .iter()
            .map(|&u| pp.inv(u).expect("unit part is invertible"))
            .collect();
        Self {
            pp,
            unit_fact,
            inv_unit_fact,
            val_fact,
        }
    }

    pub fn bound(&self) -> usize {
        self.unit_fact.len() - 1
    }

    /// `C(n, k) mod p^e`, zero outside `0 ≤ k ≤ n`.
    pub fn binom(&self, n: i64, k: i64) -> u64 {
        if n < 0 || k < 0 || k > n {
            return 0;
        }
        let (n, k) = (n as usize, k as usize);
        let v = self.val_fact[n] - self.val_fact[k] - self.val_fact[n - k];
        if v >= self.pp.e as u64 {
            return 0;
        }
        let u = self.pp.mul(
            self.unit_fact[n],
            self.pp
                .mul(self.inv_unit_fact[k], self.inv_unit_fact[n - k]),
        );
        self.pp.mul(u, self.pp.pow(self.pp.p, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_binom(n: u64, k: u64) -> u128 {
        (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
    }

    #[test]
    fn binomials_match_exact_values() {
        for (p, e) in [(2, 10), (3, 6), (5, 4), (7, 3), (47, 3)] {
            let pp = PrimePower::new(p, e).unwrap();
            let t = BinomialTable::new(pp, 60);
            for n in 0..=60u64 {
                for k in 0..=n {
                    let want = (exact_binom(n, k) % pp.modulus as u128) as u64;
                    assert_eq!(t.binom(n as i64, k as i64), want, "C({n},{k}) mod {p}^{e}");
                }
            }
            assert_eq!(t.binom(5, 7), 0);
            assert_eq!(t.binom(-1, 0), 0);
        }
    }

    #[test]
    fn modulus_limit() {
        assert!(PrimePower::new(11, 9).is_some());
        assert!(PrimePower::new(2, 62).is_none());
        assert!(PrimePower::new(2, 61).is_some());
        let pp = PrimePower::new(5, 3).unwrap();
        assert_eq!(pp.mul(pp.inv(7).unwrap(), 7), 1);
        assert_eq!(pp.inv(10), None);
    }
}
