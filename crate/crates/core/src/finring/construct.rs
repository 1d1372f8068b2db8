use std::collections::BTreeMap;

use super::{FiniteRing, RingIdeal, Subring, MAX_TABLE_SIZE};
use crate::error::{Error, Result};

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`.
/// Coefficients are stored lowest degree first.
fn poly_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    while a.len() > dm {
        let lead = a.pop().unwrap() % p;
        if lead != 0 {
            let shift = a.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - lead * c % p) % p;
            }
        }
    }
    a
}

fn poly_from_index(mut idx: u64, p: u64, len: usize) -> Vec<u64> {
    (0..len)
        .map(|_| {
            let c = idx % p;
            idx /= p;
            c
        })
        .collect()
}

fn poly_label(coeffs: &[u64]) -> String {
    let mut terms = Vec::new();
    for (i, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let var = match i {
            0 => String::new(),
            1 => "x".to_string(),
            _ => format!("x^{i}"),
        };
        terms.push(match (c, i) {
            (_, 0) => c.to_string(),
            (1, _) => var,
            _ => format!("{c}{var}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Irreducibility of a monic polynomial over `F_p`, by trial division by
/// every monic polynomial of degree at most half its degree.
pub fn is_irreducible(p: u64, modulus: &[u64]) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let k = modulus.len().saturating_sub(1);
    if k == 0 || modulus[k] % p != 1 {
        return Err(Error::InvalidArgument("modulus must be monic of positive degree".into()));
    }
    let m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
    for d in 1..=k / 2 {
        for low in 0..p.pow(d as u32) {
            let mut divisor = poly_from_index(low, p, d);
            divisor.push(1);
            if poly_rem(m.clone(), &divisor, p).iter().all(|&c| c == 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The monic irreducible polynomial of degree `k` over `F_p` whose lower
/// coefficients have the smallest base-`p` index.
pub fn first_irreducible(p: u64, k: u32) -> Result<Vec<u64>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    for low in 0..p.pow(k) {
        let mut cand = poly_from_index(low, p, k as usize);
        cand.push(1);
        if is_irreducible(p, &cand)? {
            return Ok(cand);
        }
    }
    Err(Error::Internal(format!("no irreducible of degree {k} over F_{p}")))
}

/// Mixed-radix encoding of tuples, first coordinate least significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedRadix {
    sizes: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl MixedRadix {
    pub fn new(sizes: Vec<usize>) -> Self {
        let mut strides = Vec::with_capacity(sizes.len());
        let mut total = 1usize;
        for &s in &sizes {
            strides.push(total);
            total = total.saturating_mul(s);
        }
        MixedRadix { sizes, strides, total }
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn encode(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.strides).map(|(d, s)| d * s).sum()
    }

    pub fn digit(&self, x: usize, i: usize) -> usize {
        x / self.strides[i] % self.sizes[i]
    }

    pub fn decode(&self, x: usize) -> Vec<usize> {
        (0..self.sizes.len()).map(|i| self.digit(x, i)).collect()
    }
}

impl FiniteRing {
    /// `Z/nZ`.
    pub fn zmod(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("modulus must be positive".into()));
        }
        if n == 1 {
            return Err(Error::ZeroRing);
        }
        if n > MAX_TABLE_SIZE {
            return Err(Error::CapExceeded { size: n, cap: MAX_TABLE_SIZE });
        }
        let mut add = Vec::with_capacity(n * n);
        let mut mul = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                add.push(((x + y) % n) as u16);
                mul.push((x * y % n) as u16);
            }
        }
        Self::from_flat(n, add, mul, None)
    }

    /// `F_p[x]/(m)` for a monic `m`, irreducible or not. Element `Σ c_i x^i`
    /// has index `Σ c_i p^i` and a polynomial label.
    pub fn poly_quotient(p: u64, modulus: &[u64]) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let k = modulus.len().saturating_sub(1);
        if k == 0 || modulus[k] % p != 1 {
            return Err(Error::InvalidArgument("modulus must be monic of positive degree".into()));
        }
        let n = (p as usize).checked_pow(k as u32).filter(|&n| n <= MAX_TABLE_SIZE);
        let n = n.ok_or(Error::CapExceeded { size: usize::MAX, cap: MAX_TABLE_SIZE })?;
        let m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
        let polys: Vec<Vec<u64>> = (0..n as u64).map(|i| poly_from_index(i, p, k)).collect();
        let index = |c: &[u64]| c.iter().rev().fold(0u64, |acc, &d| acc * p + d) as u16;
        let mut add = Vec::with_capacity(n * n);
        let mut mul = Vec::with_capacity(n * n);
        for a in &polys {
            for b in &polys {
                let s: Vec<u64> = a.iter().zip(b).map(|(x, y)| (x + y) % p).collect();
                add.push(index(&s));
                let mut prod = vec![0u64; 2 * k - 1];
                for (i, &x) in a.iter().enumerate() {
                    for (j, &y) in b.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + x * y) % p;
                    }
                }
                let mut r = poly_rem(prod, &m, p);
                r.resize(k, 0);
                mul.push(index(&r));
            }
        }
        let labels = polys.iter().map(|c| poly_label(c)).collect();
        Self::from_flat(n, add, mul, Some(labels))
    }

    /// The field with `p^k` elements, using `modulus` if given (verified
    /// irreducible) and otherwise [`first_irreducible`].
    pub fn gf(p: u64, k: u32, modulus: Option<&[u64]>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("extension degree must be positive".into()));
        }
        if p.checked_pow(k).is_none_or(|n| n as usize > MAX_TABLE_SIZE) {
            return Err(Error::CapExceeded { size: usize::MAX, cap: MAX_TABLE_SIZE });
        }
        let m = match modulus {
            Some(m) => {
                if m.len() != k as usize + 1 {
                    return Err(Error::InvalidArgument(format!("modulus must have degree {k}")));
                }
                if !is_irreducible(p, m)? {
                    return Err(Error::ReduciblePolynomial(poly_label(m)));
                }
                m.to_vec()
            }
            None => first_irreducible(p, k)?,
        };
        Self::poly_quotient(p, &m)
    }

    /// Direct product, elements encoded by [`MixedRadix`] over the factor
    /// sizes.
    pub fn product(factors: &[&FiniteRing]) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::ZeroRing);
        }
        let radix = MixedRadix::new(factors.iter().map(|f| f.size()).collect());
        let n = radix.total();
        if n > MAX_TABLE_SIZE {
            return Err(Error::CapExceeded { size: n, cap: MAX_TABLE_SIZE });
        }
        let digits: Vec<Vec<usize>> = (0..n).map(|x| radix.decode(x)).collect();
        let mut add = Vec::with_capacity(n * n);
        let mut mul = Vec::with_capacity(n * n);
        let mut buf_a = vec![0; factors.len()];
        let mut buf_m = vec![0; factors.len()];
        for dx in &digits {
            for dy in &digits {
                for (i, f) in factors.iter().enumerate() {
                    buf_a[i] = f.add(dx[i], dy[i]);
                    buf_m[i] = f.mul(dx[i], dy[i]);
                }
                add.push(radix.encode(&buf_a) as u16);
                mul.push(radix.encode(&buf_m) as u16);
            }
        }
        let labels = digits
            .iter()
            .map(|d| {
                let parts: Vec<String> = d.iter().zip(factors).map(|(&x, f)| f.label(x)).collect();
                format!("({})", parts.join(","))
            })
            .collect();
        Self::from_flat(n, add, mul, Some(labels))
    }

    /// `R/I` together with the projection `R → R/I`. Cosets are numbered in
    /// order of their smallest element, which also labels them.
    pub fn quotient(&self, ideal: &RingIdeal) -> Result<(FiniteRing, Vec<usize>)> {
        self.check_ideal(ideal)?;
        let mut rep_of = vec![usize::MAX; self.n];
        let mut reps = Vec::new();
        for x in 0..self.n {
            if rep_of[x] != usize::MAX {
                continue;
            }
            let id = reps.len();
            reps.push(x);
            for i in ideal.elements() {
                rep_of[self.add(x, i)] = id;
            }
        }
        let m = reps.len();
        let mut add = Vec::with_capacity(m * m);
        let mut mul = Vec::with_capacity(m * m);
        for &a in &reps {
            for &b in &reps {
                add.push(rep_of[self.add(a, b)] as u16);
                mul.push(rep_of[self.mul(a, b)] as u16);
            }
        }
        let labels = reps.iter().map(|&r| self.label(r)).collect();
        let q = Self::from_flat(m, add, mul, Some(labels))?;
        Ok((q, rep_of))
    }

    /// A subring as a ring in its own right, with its embedding.
    pub fn restrict(&self, s: &Subring) -> Result<(FiniteRing, Vec<usize>)> {
        self.check_subring(s)?;
        let elems: Vec<usize> = s.elements().collect();
        self.sub_structure(&elems)
    }

    /// The corner ring `eR` of an idempotent `e`, whose identity is `e`.
    pub fn corner(&self, e: usize) -> Result<(FiniteRing, Vec<usize>)> {
        self.check_element(e)?;
        if !self.is_idempotent(e) {
            return Err(Error::InvalidArgument(format!("{} is not idempotent", self.label(e))));
        }
        let mut elems: Vec<usize> = (0..self.n).map(|r| self.mul(e, r)).collect();
        elems.sort_unstable();
        elems.dedup();
        self.sub_structure(&elems)
    }

    /// Tables restricted to `elems`, which must be closed under `+` and `·`.
    fn sub_structure(&self, elems: &[usize]) -> Result<(FiniteRing, Vec<usize>)> {
        let pos: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let m = elems.len();
        let mut add = Vec::with_capacity(m * m);
        let mut mul = Vec::with_capacity(m * m);
        for &a in elems {
            for &b in elems {
                let look = |z: usize| {
                    pos.get(&z)
                        .map(|&i| i as u16)
                        .ok_or_else(|| Error::NotSubring(format!("not closed at ({}, {})", self.label(a), self.label(b))))
                };
                add.push(look(self.add(a, b))?);
                mul.push(look(self.mul(a, b))?);
            }
        }
        let labels = elems.iter().map(|&x| self.label(x)).collect();
        let ring = Self::from_flat(m, add, mul, Some(labels))?;
        Ok((ring, elems.to_vec()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gf4_labels_and_modulus() {
        let f = FiniteRing::gf(2, 2, None).unwrap();
        assert_eq!(f.labels().unwrap(), ["0", "1", "x", "x+1"]);
        // x * x = x + 1 under x^2 + x + 1
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn first_irreducibles() {
        assert_eq!(first_irreducible(2, 2).unwrap(), vec![1, 1, 1]);
        assert_eq!(first_irreducible(2, 4).unwrap(), vec![1, 1, 0, 0, 1]);
        assert_eq!(first_irreducible(3, 2).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn reducible_modulus_is_rejected() {
        let err = FiniteRing::gf(2, 2, Some(&[1, 0, 1])).unwrap_err();
        assert!(matches!(err, Error::ReduciblePolynomial(_)));
        assert_eq!(FiniteRing::gf(4, 1, None).unwrap_err(), Error::NotPrime(4));
    }

    #[test]
    fn dual_numbers_are_local_not_field() {
        let r = FiniteRing::poly_quotient(2, &[0, 0, 1]).unwrap();
        assert_eq!(r.size(), 4);
        assert!(!r.is_field());
        assert!(r.is_indecomposable());
    }

    #[test]
    fn product_of_gf4_and_gf2() {
        let a = FiniteRing::gf(2, 2, None).unwrap();
        let b = FiniteRing::gf(2, 1, None).unwrap();
        let p = FiniteRing::product(&[&a, &b]).unwrap();
        assert_eq!(p.size(), 8);
        assert_eq!(p.idempotents().len(), 4);
    }

    #[test]
    fn quotient_of_zmod_six() {
        let r = FiniteRing::zmod(6).unwrap();
        let (q, proj) = r.quotient(&r.principal_ideal(2).unwrap()).unwrap();
        assert_eq!(q.size(), 2);
        assert_eq!(proj, vec![0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn corner_of_idempotent() {
        let r = FiniteRing::zmod(6).unwrap();
        let (c, emb) = r.corner(3).unwrap();
        assert_eq!(c.size(), 2);
        assert_eq!(emb[c.one()], 3);
    }

    #[test]
    fn mixed_radix_round_trip() {
        let m = MixedRadix::new(vec![2, 4, 3]);
        for x in 0..m.total() {
            assert_eq!(m.encode(&m.decode(x)), x);
        }
    }
}
