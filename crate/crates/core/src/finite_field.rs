//! Arithmetic in GF(q) ⊂ GF(q²) for odd prime powers q = p^e.
//!
//! GF(q²) is modelled directly as GF(p)[x]/(m(x)) with `m` monic irreducible of
//! degree 2e; GF(q) is recovered as the fixed field of the Frobenius map
//! x ↦ x^q. An element is stored as its position in the canonical enumeration:
//! the coefficient vector (c0, c1, …, c_{2e−1}) read as base-p digits, c0
//! least significant. Point indices in the geometry modules depend on this
//! ordering, so it must not change.
//!
//! Multiplication goes through discrete log tables built from a primitive
//! element; addition through a digit-wise table. Both are derived from the
//! polynomial kernel at construction time.

use std::fmt;

use crate::bounds::is_prime;
use crate::error::{Error, Result};

/// Largest supported |GF(q²)|. Covers every odd q ≤ 31.
pub const MAX_FIELD_ORDER: u32 = 1024;

/// An element of GF(q²), identified by its canonical index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    /// Position of this element in the canonical enumeration.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Arithmetic context for GF(q) ⊂ GF(q²).
#[derive(Clone)]
pub struct FieldCtx {
    p: u32,
    e: u32,
    q: u32,
    order: u32,
    modulus: Vec<u32>,
    add: Vec<u16>,
    neg: Vec<u16>,
    exp: Vec<u16>,
    log: Vec<u16>,
    frob: Vec<u16>,
    subfield: Vec<FieldElem>,
    subfield_pos: Vec<u32>,
    half_one: FieldElem,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("q", &self.q)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl FieldCtx {
    /// Builds GF(p^e) ⊂ GF(p^{2e}).
    ///
    /// The modulus is the first monic irreducible polynomial of degree 2e over
    /// GF(p) when candidates are ordered by their lower coefficients read as a
    /// base-p integer (c0 least significant).
    pub fn new(p: u32, e: u32) -> Result<Self> {
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        if e == 0 {
            return Err(Error::InvalidArgument("extension degree must be positive".into()));
        }
        let degree = 2 * e;
        let order = (p as u64).checked_pow(degree).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER as u64 {
            return Err(Error::FieldTooLarge { order, max: MAX_FIELD_ORDER as u64 });
        }
        let order = order as u32;
        let q = p.pow(e);
        let modulus = lowest_irreducible(p, degree as usize);
        Ok(Self::with_modulus(p, e, q, order, modulus))
    }

    /// Builds the context for GF(q) ⊂ GF(q²) from the prime power q.
    pub fn for_q(q: u64) -> Result<Self> {
        let (p, e) = crate::bounds::is_prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if p == 2 {
            return Err(Error::EvenCharacteristic);
        }
        if p > u32::MAX as u64 {
            return Err(Error::FieldTooLarge { order: q.saturating_mul(q), max: MAX_FIELD_ORDER as u64 });
        }
        Self::new(p as u32, e)
    }

    fn with_modulus(p: u32, e: u32, q: u32, order: u32, modulus: Vec<u32>) -> Self {
        let n = order as usize;
        let degree = modulus.len() - 1;

        let digits: Vec<Vec<u32>> = (0..order).map(|i| to_digits(i, p, degree)).collect();

        let mut add = vec![0u16; n * n];
        for i in 0..n {
            for j in 0..n {
                let sum: Vec<u32> = digits[i].iter().zip(&digits[j]).map(|(a, b)| (a + b) % p).collect();
                add[i * n + j] = from_digits(&sum, p) as u16;
            }
        }
        let neg = (0..n)
            .map(|i| {
                let d: Vec<u32> = digits[i].iter().map(|&a| (p - a) % p).collect();
                from_digits(&d, p) as u16
            })
            .collect();

        let generator = (2..order)
            .find(|&g| is_primitive(&digits[g as usize], &modulus, p, order))
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = vec![0u16; n - 1];
        let mut log = vec![0u16; n];
        let mut cur = vec![0u32; degree];
        cur[0] = 1;
        for (k, slot) in exp.iter_mut().enumerate() {
            let idx = from_digits(&cur, p);
            *slot = idx as u16;
            log[idx as usize] = k as u16;
            cur = poly_mulmod(&cur, &digits[generator as usize], &modulus, p);
        }

        let mut ctx = FieldCtx {
            p,
            e,
            q,
            order,
            modulus,
            add,
            neg,
            exp,
            log,
            frob: Vec::new(),
            subfield: Vec::new(),
            subfield_pos: Vec::new(),
            half_one: FieldElem::ZERO,
        };
        ctx.frob = (0..order).map(|i| ctx.pow(FieldElem(i), q as u64).0 as u16).collect();
        ctx.subfield = (0..order).map(FieldElem).filter(|&x| ctx.frobenius(x) == x).collect();
        ctx.subfield_pos = vec![u32::MAX; n];
        for (pos, x) in ctx.subfield.iter().enumerate() {
            ctx.subfield_pos[x.index()] = pos as u32;
        }
        ctx.half_one = ctx.inv(ctx.from_int(2)).expect("2 is invertible in odd characteristic");
        ctx
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// The order of the subfield GF(q).
    pub fn q(&self) -> u32 {
        self.q
    }

    /// |GF(q²)| = q².
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Extension degree of GF(q²) over the prime field.
    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Monic modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Element with canonical index `index`. Panics when out of range.
    #[inline]
    pub fn elem(&self, index: u32) -> FieldElem {
        assert!(index < self.order, "field index {index} out of range");
        FieldElem(index)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem> {
        if coeffs.len() != self.degree() {
            return Err(Error::Parse(format!("expected {} coefficients, got {}", self.degree(), coeffs.len())));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::Parse(format!("coefficient {c} not reduced mod {}", self.p)));
        }
        Ok(FieldElem(from_digits(coeffs, self.p)))
    }

    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        to_digits(x.0, self.p, self.degree())
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.p as i64) as u32)
    }

    #[inline]
    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        FieldElem(self.add[x.index() * self.order as usize + y.index()] as u32)
    }

    #[inline]
    pub fn neg(&self, x: FieldElem) -> FieldElem {
        FieldElem(self.neg[x.index()] as u32)
    }

    #[inline]
    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add(x, self.neg(y))
    }

    #[inline]
    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if x.is_zero() || y.is_zero() {
            return FieldElem::ZERO;
        }
        let m = self.order as usize - 1;
        let k = (self.log[x.index()] as usize + self.log[y.index()] as usize) % m;
        FieldElem(self.exp[k] as u32)
    }

    pub fn inv(&self, x: FieldElem) -> Option<FieldElem> {
        if x.is_zero() {
            return None;
        }
        let m = self.order as usize - 1;
        let k = (m - self.log[x.index()] as usize) % m;
        Some(FieldElem(self.exp[k] as u32))
    }

    /// x^n by square-and-multiply; 0^0 = 1.
    pub fn pow(&self, x: FieldElem, mut n: u64) -> FieldElem {
        let mut base = x;
        let mut acc = FieldElem::ONE;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// x ↦ x^q.
    #[inline]
    pub fn frobenius(&self, x: FieldElem) -> FieldElem {
        FieldElem(self.frob[x.index()] as u32)
    }

    /// Relative trace x + x^q, landing in GF(q).
    #[inline]
    pub fn trace(&self, x: FieldElem) -> FieldElem {
        self.add(x, self.frobenius(x))
    }

    /// Relative norm x^{q+1}, landing in GF(q).
    #[inline]
    pub fn norm(&self, x: FieldElem) -> FieldElem {
        self.mul(x, self.frobenius(x))
    }

    /// The unique y with 2y = x.
    #[inline]
    pub fn half(&self, x: FieldElem) -> FieldElem {
        self.mul(x, self.half_one)
    }

    #[inline]
    pub fn is_in_subfield(&self, x: FieldElem) -> bool {
        self.subfield_pos[x.index()] != u32::MAX
    }

    /// Position of `x` among the subfield elements, if `x ∈ GF(q)`.
    #[inline]
    pub fn subfield_position(&self, x: FieldElem) -> Option<usize> {
        let pos = self.subfield_pos[x.index()];
        (pos != u32::MAX).then_some(pos as usize)
    }

    /// GF(q) in canonical order.
    pub fn subfield(&self) -> &[FieldElem] {
        &self.subfield
    }

    /// All of GF(q²) in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.order).map(FieldElem)
    }

    /// Evaluates the monic cubic y³ + c2·y² + c1·y + c0 at `y`.
    pub fn eval_monic_cubic(&self, c2: FieldElem, c1: FieldElem, c0: FieldElem, y: FieldElem) -> FieldElem {
        // Horner
        let mut acc = self.add(y, c2);
        acc = self.add(self.mul(acc, y), c1);
        self.add(self.mul(acc, y), c0)
    }

    /// A cubic over a field is irreducible exactly when it has no root there.
    pub fn is_irreducible_cubic(&self, c2: FieldElem, c1: FieldElem, c0: FieldElem) -> bool {
        self.elements().all(|y| !self.eval_monic_cubic(c2, c1, c0, y).is_zero())
    }

    /// "c0,c1,...,c_{2e-1}".
    pub fn format_elem(&self, x: FieldElem) -> String {
        let coeffs = self.coeffs(x);
        join(&coeffs, ",")
    }

    pub fn parse_elem(&self, s: &str) -> Result<FieldElem> {
        let coeffs = s
            .split(',')
            .map(|c| c.trim().parse::<u32>().map_err(|e| Error::Parse(format!("{s:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        self.from_coeffs(&coeffs)
    }

    /// "p,e,m0,m1,...,m_{2e}" with the monic modulus coefficients low to high.
    pub fn serialize(&self) -> String {
        format!("{},{},{}", self.p, self.e, join(&self.modulus, ","))
    }
}

fn join(values: &[u32], sep: &str) -> String {
    values.iter().map(u32::to_string).collect::<Vec<_>>().join(sep)
}

fn to_digits(mut n: u32, p: u32, len: usize) -> Vec<u32> {
    let mut d = vec![0; len];
    for slot in d.iter_mut() {
        *slot = n % p;
        n /= p;
    }
    d
}

fn from_digits(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Remainder of `a` modulo the monic polynomial `m` over GF(p).
pub(crate) fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dm;
            for (i, &c) in m[..dm].iter().enumerate() {
                let sub = (lead as u64 * c as u64 % p as u64) as u32;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
    }
    r.resize(dm, 0);
    r
}

/// Product of two reduced polynomials modulo `m`, the reference multiplication.
pub(crate) fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % p as u64) as u32;
        }
    }
    poly_rem(&prod, m, p)
}

fn poly_pow(x: &[u32], mut n: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut acc = vec![0; m.len() - 1];
    acc[0] = 1;
    let mut base = x.to_vec();
    while n > 0 {
        if n & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m, p);
        }
        base = poly_mulmod(&base, &base, m, p);
        n >>= 1;
    }
    acc
}

fn is_primitive(x: &[u32], m: &[u32], p: u32, order: u32) -> bool {
    let group = (order - 1) as u64;
    let mut one = vec![0; m.len() - 1];
    one[0] = 1;
    prime_factors(group).into_iter().all(|l| poly_pow(x, group / l, m, p) != one)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Whether the monic polynomial `f` is irreducible over GF(p), by trial
/// division with every monic polynomial of degree ≤ deg(f)/2.
pub(crate) fn is_irreducible_over_prime(f: &[u32], p: u32) -> bool {
    let n = f.len() - 1;
    for d in 1..=n / 2 {
        for low in 0..p.pow(d as u32) {
            let mut g = to_digits(low, p, d);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn lowest_irreducible(p: u32, degree: usize) -> Vec<u32> {
    (0..p.pow(degree as u32))
        .map(|low| {
            let mut f = to_digits(low, p, degree);
            f.push(1);
            f
        })
        .find(|f| is_irreducible_over_prime(f, p))
        .expect("irreducible polynomials exist in every degree")
}
