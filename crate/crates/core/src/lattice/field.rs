//! The finite field `F_{q^r}` with elements stored as `u32` digit vectors
//! base `p` (polynomial basis), multiplied through exp/log tables.

use crate::context::prime_power;
use crate::error::{Error, Result};

pub type Fe = u32;

/// Largest field order supported by the table representation.
pub const MAX_ORDER: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisField {
    p: u32,
    /// `q = p^k`
    k: u32,
    r: u32,
    degree: u32,
    order: u32,
    /// Coefficients `c_0..c_{e-1}` of the modulus `x^e + sum c_i x^i`.
    modulus: Vec<u32>,
    exp: Vec<Fe>,
    log: Vec<u32>,
}

impl GaloisField {
    /// `F_{q^r}`.
    pub fn new(q: u64, r: u32) -> Result<Self> {
        let (p, k) = prime_power(q)
            .ok_or_else(|| Error::InvalidContext(format!("q = {q} is not a prime power")))?;
        if r == 0 {
            return Err(Error::Precondition(
                "field degree r must be positive".into(),
            ));
        }
        let degree = k * r;
        let order = (p as u128).pow(degree);
        if order > MAX_ORDER as u128 {
            return Err(Error::FieldTooSmall(format!(
                "F_{{{q}^{r}}} exceeds the supported order {MAX_ORDER}"
            )));
        }
        let p = p as u32;
        let order = order as u32;
        let mut field = GaloisField {
            p,
            k,
            r,
            degree,
            order,
            modulus: Vec::new(),
            exp: Vec::new(),
            log: Vec::new(),
        };
        field.find_primitive_modulus()?;
        Ok(field)
    }

    fn digits(&self, a: Fe) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree as usize);
        let mut a = a;
        for _ in 0..self.degree {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    fn compose_digits(&self, digits: &[u32]) -> Fe {
        digits.iter().rev().fold(0, |acc, &d| acc * self.p + d)
    }

    fn times_x(&self, a: Fe, modulus: &[u32]) -> Fe {
        if self.p == 2 {
            let mask = modulus.iter().rev().fold(0, |acc, &c| (acc << 1) | c);
            let shifted = a << 1;
            return if shifted >> self.degree & 1 == 1 {
                (shifted ^ (1 << self.degree)) ^ mask
            } else {
                shifted
            };
        }
        let mut d = self.digits(a);
        let top = d.pop().unwrap_or(0);
        d.insert(0, 0);
        for (di, &c) in d.iter_mut().zip(modulus) {
            *di = (*di + self.p * self.p - top * c % self.p) % self.p;
        }
        self.compose_digits(&d)
    }

    /// First monic modulus (in the integer order of its low coefficients)
    /// for which `x` generates the multiplicative group.
    fn find_primitive_modulus(&mut self) -> Result<()> {
        let units = self.order - 1;
        if self.order == 2 {
            self.modulus = vec![1];
            self.exp = vec![1];
            self.log = vec![0, 0];
            return Ok(());
        }
        for code in 1..self.order {
            let modulus = self.digits(code);
            if modulus[0] == 0 {
                continue;
            }
            let mut exp = Vec::with_capacity(units as usize);
            let mut cur: Fe = 1;
            let mut primitive = true;
            for step in 0..units {
                exp.push(cur);
                cur = self.times_x(cur, &modulus);
                if cur == 1 && step + 1 < units {
                    primitive = false;
                    break;
                }
            }
            if primitive && cur == 1 {
                let mut log = vec![0u32; self.order as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                self.modulus = modulus;
                self.exp = exp;
                self.log = log;
                return Ok(());
            }
        }
        Err(Error::InternalInvariant(
            "no primitive modulus found".into(),
        ))
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u64 {
        u64::from(self.p).pow(self.k)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn contains(&self, a: Fe) -> bool {
        a < self.order
    }

    pub fn add(&self, a: Fe, b: Fe) -> Fe {
        if self.p == 2 {
            return a ^ b;
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0;
        let mut place = 1;
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: Fe) -> Fe {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0;
        let mut place = 1;
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: Fe, b: Fe) -> Fe {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fe, b: Fe) -> Fe {
        if a == 0 || b == 0 {
            return 0;
        }
        let units = self.order - 1;
        let s = (self.log[a as usize] + self.log[b as usize]) % units;
        self.exp[s as usize]
    }

    pub fn inv(&self, a: Fe) -> Result<Fe> {
        if a == 0 {
            return Err(Error::Precondition(
                "division by zero in the residue field".into(),
            ));
        }
        let units = self.order - 1;
        let l = self.log[a as usize];
        Ok(self.exp[((units - l) % units) as usize])
    }

    pub fn div(&self, a: Fe, b: Fe) -> Result<Fe> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fe, e: u64) -> Fe {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let units = u64::from(self.order - 1);
        let l = u64::from(self.log[a as usize]);
        self.exp[((l * (e % units)) % units) as usize]
    }

    /// `a^q`.
    pub fn frob(&self, a: Fe) -> Fe {
        self.pow(a, self.q())
    }

    /// `a^{q^k}` for any `k >= 0`.
    pub fn frob_n(&self, a: Fe, k: u32) -> Fe {
        let units = u64::from(self.order - 1);
        let mut e = 1u64;
        for _ in 0..k {
            e = e * self.q() % units.max(1);
        }
        if a == 0 {
            0
        } else {
            self.pow(a, if e == 0 { units } else { e })
        }
    }

    /// Inverse of [`GaloisField::frob`]: `a^{q^{r-1}}`.
    pub fn frob_inv(&self, a: Fe) -> Fe {
        self.frob_n(a, self.r - 1)
    }

    /// Elements of the subfield `F_{q^k}` (`k | r`), ascending.
    pub fn subfield(&self, k: u32) -> Result<Vec<Fe>> {
        if k == 0 || !self.r.is_multiple_of(k) {
            return Err(Error::Precondition(format!(
                "F_{{q^{k}}} is not a subfield of F_{{q^{}}}",
                self.r
            )));
        }
        Ok((0..self.order)
            .filter(|&a| self.frob_n(a, k) == a)
            .collect())
    }
}
