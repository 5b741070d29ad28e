//! Finite fields F_q with q = p^e ≤ 81, table driven.
//!
//! An element is a `u8` index whose base-p digits are the coefficients of
//! its representative polynomial modulo a fixed irreducible polynomial.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Default upper bound on q.
pub const DEFAULT_FIELD_BOUND: u64 = 81;

struct Tables {
    p: u32,
    e: u32,
    q: usize,
    modulus: Vec<u32>,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
    zeta: u8,
}

/// A finite field handle. Cheap to clone; all clones share the same tables.
#[derive(Clone)]
pub struct Fq(Arc<Tables>);

impl PartialEq for Fq {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.p == other.0.p && self.0.e == other.0.e)
    }
}
impl Eq for Fq {}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0.q)
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

fn digits(mut x: usize, p: u32, e: u32) -> Vec<u32> {
    (0..e)
        .map(|_| {
            let d = (x % p as usize) as u32;
            x /= p as usize;
            d
        })
        .collect()
}

fn undigits(d: &[u32], p: u32) -> usize {
    d.iter().rev().fold(0usize, |acc, &c| acc * p as usize + c as usize)
}

/// Multiplies two polynomials over F_p and reduces modulo a monic `modulus`.
fn polymulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let e = modulus.len() - 1;
    let mut prod = vec![0u32; 2 * e];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    for k in (e..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        for i in 0..=e {
            let idx = k - e + i;
            prod[idx] = (prod[idx] + p - (c * modulus[i]) % p) % p;
        }
    }
    prod.truncate(e);
    prod
}

/// Finds the lexicographically first monic irreducible polynomial of degree e over F_p.
fn find_irreducible(p: u32, e: u32) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    let count = (p as usize).pow(e);
    'cand: for idx in 0..count {
        let mut f = digits(idx, p, e);
        f.push(1);
        // reject if any monic polynomial of degree 1..=e/2 divides f
        for d in 1..=e / 2 {
            for gidx in 0..(p as usize).pow(d) {
                let mut g = digits(gidx, p, d);
                g.push(1);
                if poly_rem(&f, &g, p).iter().all(|&c| c == 0) {
                    continue 'cand;
                }
            }
        }
        return f;
    }
    unreachable!("an irreducible polynomial of every degree exists")
}

fn poly_rem(f: &[u32], g: &[u32], p: u32) -> Vec<u32> {
    let mut r = f.to_vec();
    let dg = g.len() - 1;
    while r.len() > dg {
        let c = *r.last().unwrap();
        let shift = r.len() - 1 - dg;
        for i in 0..=dg {
            r[shift + i] = (r[shift + i] + p - (c * g[i]) % p) % p;
        }
        r.pop();
    }
    r
}

impl Fq {
    /// Builds F_{p^e} with the default size bound.
    pub fn new(p: u32, e: u32) -> Result<Self> {
        Self::with_bound(p, e, DEFAULT_FIELD_BOUND)
    }

    /// Builds F_{p^e}, rejecting fields larger than `bound`.
    pub fn with_bound(p: u32, e: u32, bound: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if e == 0 {
            return Err(Error::Precondition("extension degree must be positive".into()));
        }
        let size = (p as u64).checked_pow(e).unwrap_or(u64::MAX);
        if size > bound || size > 255 {
            return Err(Error::FieldTooLarge { size, bound });
        }
        let q = size as usize;
        let modulus = find_irreducible(p, e);
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        let mut neg = vec![0u8; q];
        for a in 0..q {
            let da = digits(a, p, e);
            let dn: Vec<u32> = da.iter().map(|&c| (p - c) % p).collect();
            neg[a] = undigits(&dn, p) as u8;
            for b in 0..q {
                let db = digits(b, p, e);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[a * q + b] = undigits(&s, p) as u8;
                mul[a * q + b] = undigits(&polymulmod(&da, &db, &modulus, p), p) as u8;
            }
        }
        let mut inv = vec![0u8; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
        }
        let order = |g: usize| {
            let mut x = g;
            let mut k = 1;
            while x != 1 {
                x = mul[x * q + g] as usize;
                k += 1;
            }
            k
        };
        let zeta = (1..q).find(|&g| order(g) == q - 1).unwrap() as u8;
        Ok(Fq(Arc::new(Tables { p, e, q, modulus, add, mul, neg, inv, zeta })))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn e(&self) -> u32 {
        self.0.e
    }
    pub fn q(&self) -> usize {
        self.0.q
    }
    /// Coefficients (low degree first) of the defining irreducible polynomial.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }
    /// A generator of the cyclic group F_q^×.
    pub fn zeta(&self) -> u8 {
        self.0.zeta
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        self.0.add[a as usize * self.0.q + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: u8, b: u8) -> u8 {
        self.add(a, self.0.neg[b as usize])
    }
    #[inline]
    pub fn neg(&self, a: u8) -> u8 {
        self.0.neg[a as usize]
    }
    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        self.0.mul[a as usize * self.0.q + b as usize]
    }
    pub fn inv(&self, a: u8) -> Result<u8> {
        if a == 0 {
            return Err(Error::DivisionByZero { prec: 0 });
        }
        Ok(self.0.inv[a as usize])
    }
    pub fn div(&self, a: u8, b: u8) -> Result<u8> {
        Ok(self.mul(a, self.inv(b)?))
    }
    pub fn pow(&self, a: u8, n: i64) -> u8 {
        if n < 0 {
            return self.pow(self.0.inv[a as usize], -n);
        }
        let mut r = 1u8;
        let mut b = a;
        let mut k = n as u64;
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(r, b);
            }
            b = self.mul(b, b);
            k >>= 1;
        }
        r
    }
    /// ζ^k for any integer k.
    pub fn zeta_pow(&self, k: i64) -> u8 {
        self.pow(self.0.zeta, k.rem_euclid(self.0.q as i64 - 1))
    }
    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> u8 {
        n.rem_euclid(self.0.p as i64) as u8
    }
    /// The p-power Frobenius.
    pub fn frob(&self, a: u8) -> u8 {
        self.pow(a, self.0.p as i64)
    }
    pub fn elements(&self) -> impl Iterator<Item = u8> {
        0..self.0.q as u8
    }
    /// An F_p-basis of F_q (the monomials of the polynomial basis).
    pub fn prime_basis(&self) -> Vec<u8> {
        (0..self.0.e).map(|i| (self.0.p as usize).pow(i) as u8).collect()
    }
    /// Binomial coefficient C(n, k) reduced into the prime field (Lucas).
    pub fn binom(&self, n: u64, k: u64) -> u8 {
        let p = self.0.p as u64;
        let (mut n, mut k) = (n, k);
        let mut r: u64 = 1;
        while k > 0 || n > 0 {
            let (a, b) = (n % p, k % p);
            if b > a {
                return 0;
            }
            r = r * small_binom(a, b) % p;
            n /= p;
            k /= p;
        }
        r as u8
    }
}

fn small_binom(n: u64, k: u64) -> u64 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as u64
}

impl Fq {
    /// Compact human-readable rendering of an element.
    pub fn show(&self, a: u8) -> String {
        if self.0.e == 1 {
            format!("{}", a)
        } else {
            format!("g{}", a)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_axioms(f: &Fq) {
        let q = f.q() as u8;
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            assert_eq!(f.pow(a, f.q() as i64), a, "x^q = x");
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                for c in 0..q {
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                }
            }
        }
    }

    #[test]
    fn field_axioms_all_small_fields() {
        for (p, e) in [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1), (2, 4), (3, 3), (3, 4)] {
            check_axioms(&Fq::new(p, e).unwrap());
        }
    }

    #[test]
    fn frobenius_fixes_prime_field() {
        let f = Fq::new(3, 2).unwrap();
        let fixed: Vec<u8> = f.elements().filter(|&a| f.pow(a, 3) == a).collect();
        assert_eq!(fixed, vec![0, 1, 2]);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(Fq::new(4, 1), Err(Error::NonPrime(4)));
        assert!(matches!(Fq::new(5, 3), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn zeta_generates() {
        let f = Fq::new(3, 2).unwrap();
        let mut seen: Vec<u8> = (0..8).map(|k| f.zeta_pow(k)).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn binomials_mod_p() {
        let f = Fq::new(3, 1).unwrap();
        assert_eq!(f.binom(4, 2), 0); // 6
        assert_eq!(f.binom(5, 2), 1); // 10
        assert_eq!(f.binom(3, 1), 0);
    }
}
