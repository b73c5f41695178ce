//! Arithmetic for GF(p^m) in generator-label form.
//!
//! Elements are stored as labels in `0..q`: label 0 is the zero element and
//! label `k` (1 <= k <= q-1) denotes `t^(k-1)` for a fixed multiplicative
//! generator `t`. Multiplication is exponent arithmetic mod `q-1`; addition
//! goes through precomputed tables derived from a primitive polynomial.

use std::fmt;

use thiserror::Error;

/// Largest supported field size; labels must fit a 16-bit range.
pub const MAX_Q: u64 = 65_535;

/// Field sizes up to this bound get a full q*q addition table; larger
/// fields fall back to Zech logarithms.
const ADD_TABLE_LIMIT: u64 = 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = {0} is not prime")]
    NonPrimeP(u64),
    #[error("extension degree m must be >= 1")]
    ZeroDegree,
    #[error("q = p^m exceeds the supported maximum {MAX_Q}")]
    FieldTooLarge,
    #[error("prim_poly must be monic of degree m = {expected}, got degree {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("prim_poly coefficient {0} is not reduced mod p")]
    CoefficientOutOfRange(u32),
    #[error("prim_poly is not primitive: its root does not generate the multiplicative group")]
    NonPrimitivePoly,
    #[error("no default primitive polynomial known for p = {p}, m = {m}")]
    NoDefaultPoly { p: u64, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
}

/// A field element in label encoding. Label 0 is zero, label 1 is one,
/// label k is t^(k-1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FieldElem(pub u16);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn label(self) -> u16 {
        self.0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Description of a field: characteristic, extension degree, and the
/// primitive polynomial defining the generator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    pub p: u64,
    pub m: u32,
    /// Coefficients over GF(p), low degree first, length m+1, monic.
    pub prim_poly: Vec<u32>,
}

impl FieldSpec {
    pub fn new(p: u64, m: u32, prim_poly: Vec<u32>) -> FieldSpec {
        FieldSpec { p, m, prim_poly }
    }

    /// Spec with the built-in default primitive polynomial for GF(p^m).
    pub fn with_default_poly(p: u64, m: u32) -> Result<FieldSpec, FieldError> {
        let prim_poly = default_prim_poly(p, m)?;
        Ok(FieldSpec { p, m, prim_poly })
    }
}

/// Immutable arithmetic context for GF(q). Shareable across threads;
/// every operation is pure.
pub struct FieldCtx {
    pub spec: FieldSpec,
    pub q: u32,
    /// label -> vector representation (base-p packed digits); exp[0] = 0.
    exp: Vec<u32>,
    /// vector representation -> label.
    log: Vec<u16>,
    /// Full addition table, indexed a*q+b, for q <= 1024.
    add_table: Vec<u16>,
    /// Zech logarithms for q > 1024: zech[k] = log_t(1 + t^k), with
    /// q-1 marking 1 + t^k = 0.
    zech: Vec<u32>,
    /// Label of -1 (equals 1 in characteristic 2).
    neg_one: u16,
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Built-in default primitive polynomial for GF(p^m).
///
/// For m = 1 this is x - t with t the smallest primitive root of p. For
/// m > 1 it is the first primitive polynomial in coefficient-lexicographic
/// order, except where a different classical choice is pinned below.
pub fn default_prim_poly(p: u64, m: u32) -> Result<Vec<u32>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NonPrimeP(p));
    }
    if m == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = checked_pow(p, m).ok_or(FieldError::FieldTooLarge)?;
    if q > MAX_Q {
        return Err(FieldError::FieldTooLarge);
    }
    // Pinned choices (GF(8) uses x^3 + x^2 + 1).
    if (p, m) == (2, 3) {
        return Ok(vec![1, 0, 1, 1]);
    }
    if m == 1 {
        for t in 2..p {
            if element_order(t, p) == p - 1 {
                return Ok(vec![((p - t) % p) as u32, 1]);
            }
        }
        if p == 2 {
            // GF(2): generator is 1, poly x + 1.
            return Ok(vec![1, 1]);
        }
        return Err(FieldError::NoDefaultPoly { p, m });
    }
    // Search monic degree-m polynomials in ascending coefficient order.
    let mut coeffs = vec![0u32; m as usize + 1];
    coeffs[m as usize] = 1;
    loop {
        if coeffs[0] != 0 {
            let spec = FieldSpec::new(p, m, coeffs.clone());
            if build_field(&spec).is_ok() {
                return Ok(coeffs);
            }
        }
        // Increment the low m coefficients as a base-p counter.
        let mut i = 0;
        loop {
            if i == m as usize {
                return Err(FieldError::NoDefaultPoly { p, m });
            }
            coeffs[i] += 1;
            if (coeffs[i] as u64) < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

fn element_order(t: u64, p: u64) -> u64 {
    let mut x = t % p;
    let mut ord = 1;
    while x != 1 {
        x = x * t % p;
        ord += 1;
        if ord > p {
            return 0;
        }
    }
    ord
}

fn checked_pow(p: u64, m: u32) -> Option<u64> {
    let mut q: u64 = 1;
    for _ in 0..m {
        q = q.checked_mul(p)?;
        if q > MAX_Q {
            return None;
        }
    }
    Some(q)
}

/// Builds a [`FieldCtx`], verifying that `spec.prim_poly` is primitive.
pub fn build_field(spec: &FieldSpec) -> Result<FieldCtx, FieldError> {
    let p = spec.p;
    if !is_prime(p) {
        return Err(FieldError::NonPrimeP(p));
    }
    if spec.m == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let m = spec.m as usize;
    let q = checked_pow(p, spec.m).ok_or(FieldError::FieldTooLarge)? as u32;
    if spec.prim_poly.len() != m + 1 {
        return Err(FieldError::DegreeMismatch {
            expected: m + 1,
            got: spec.prim_poly.len(),
        });
    }
    for &c in &spec.prim_poly {
        if c as u64 >= p {
            return Err(FieldError::CoefficientOutOfRange(c));
        }
    }
    if spec.prim_poly[m] != 1 {
        return Err(FieldError::DegreeMismatch {
            expected: m + 1,
            got: poly_degree(&spec.prim_poly),
        });
    }

    // Walk t^0, t^1, ... as digit vectors mod prim_poly; primitivity holds
    // iff the first q-1 powers are distinct, nonzero, and t^(q-1) = 1.
    let pu = p as u32;
    // x^m = -(c_0 + c_1 x + ... + c_{m-1} x^{m-1})
    let reduction: Vec<u32> = spec.prim_poly[..m]
        .iter()
        .map(|&c| (pu - c) % pu)
        .collect();
    let mut exp = vec![0u32; q as usize];
    let mut log = vec![0u16; q as usize];
    let mut seen = vec![false; q as usize];
    let mut digits = vec![0u32; m];
    digits[0] = 1; // t^0 = 1
    for k in 1..q {
        let packed = pack_digits(&digits, pu);
        if packed == 0 || seen[packed as usize] {
            return Err(FieldError::NonPrimitivePoly);
        }
        seen[packed as usize] = true;
        exp[k as usize] = packed;
        log[packed as usize] = k as u16;
        // multiply by x (the root t)
        let carry = digits[m - 1];
        for i in (1..m).rev() {
            digits[i] = (digits[i - 1] + carry * reduction[i]) % pu;
        }
        digits[0] = carry * reduction[0] % pu;
    }
    // After q-1 steps the walker must be back at 1.
    if pack_digits(&digits, pu) != 1 {
        return Err(FieldError::NonPrimitivePoly);
    }

    let neg_one = if p == 2 {
        1
    } else {
        // -1 = t^((q-1)/2)
        ((q - 1) / 2 + 1) as u16
    };

    let mut ctx = FieldCtx {
        spec: spec.clone(),
        q,
        exp,
        log,
        add_table: Vec::new(),
        zech: Vec::new(),
        neg_one,
    };
    if (q as u64) <= ADD_TABLE_LIMIT {
        let mut table = vec![0u16; (q as usize) * (q as usize)];
        for a in 0..q {
            for b in 0..=a {
                let s = ctx.add_slow(FieldElem(a as u16), FieldElem(b as u16)).0;
                table[(a * q + b) as usize] = s;
                table[(b * q + a) as usize] = s;
            }
        }
        ctx.add_table = table;
    } else {
        let mut zech = vec![0u32; (q - 1) as usize];
        for k in 0..q - 1 {
            let s = ctx.add_slow(FieldElem::ONE, FieldElem((k + 1) as u16));
            zech[k as usize] = if s.is_zero() {
                q - 1 // sentinel: 1 + t^k = 0
            } else {
                (s.0 - 1) as u32
            };
        }
        ctx.zech = zech;
    }
    Ok(ctx)
}

fn pack_digits(digits: &[u32], p: u32) -> u32 {
    let mut v = 0u32;
    for &d in digits.iter().rev() {
        v = v * p + d;
    }
    v
}

fn poly_degree(coeffs: &[u32]) -> usize {
    coeffs.iter().rposition(|&c| c != 0).unwrap_or(0)
}

impl FieldCtx {
    /// The generator t as a label (label 2, except in GF(2) where t = 1).
    pub fn generator(&self) -> FieldElem {
        if self.q == 2 {
            FieldElem::ONE
        } else {
            FieldElem(2)
        }
    }

    /// The generator in the field's natural representation (useful for
    /// prime fields, where this is the primitive root as an integer).
    pub fn generator_vec(&self) -> u32 {
        self.exp[self.generator().0 as usize]
    }

    pub fn elem(&self, label: u16) -> Option<FieldElem> {
        if (label as u32) < self.q {
            Some(FieldElem(label))
        } else {
            None
        }
    }

    /// Vector representation (base-p digits, low first) of a label.
    pub fn to_vector(&self, a: FieldElem) -> Vec<u32> {
        let p = self.spec.p as u32;
        let mut v = self.exp[a.0 as usize];
        let mut digits = Vec::with_capacity(self.spec.m as usize);
        for _ in 0..self.spec.m {
            digits.push(v % p);
            v /= p;
        }
        digits
    }

    /// Label of a packed vector representation.
    pub fn from_packed(&self, packed: u32) -> Option<FieldElem> {
        if packed == 0 {
            return Some(FieldElem::ZERO);
        }
        if (packed as usize) < self.log.len() {
            let l = self.log[packed as usize];
            if l != 0 {
                return Some(FieldElem(l));
            }
        }
        None
    }

    fn add_slow(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.spec.p as u32;
        let mut va = self.exp[a.0 as usize];
        let mut vb = self.exp[b.0 as usize];
        let mut packed = 0u32;
        let mut mult = 1u32;
        for _ in 0..self.spec.m {
            packed += (va % p + vb % p) % p * mult;
            mult *= p;
            va /= p;
            vb /= p;
        }
        if packed == 0 {
            FieldElem::ZERO
        } else {
            FieldElem(self.log[packed as usize])
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if !self.add_table.is_empty() {
            return FieldElem(self.add_table[(a.0 as usize) * self.q as usize + b.0 as usize]);
        }
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        // t^i + t^j = t^i (1 + t^(j-i)), via Zech logs.
        let n = self.q - 1;
        let i = (a.0 - 1) as u32;
        let j = (b.0 - 1) as u32;
        let d = (j + n - i) % n;
        let z = self.zech[d as usize];
        if z == n {
            FieldElem::ZERO
        } else {
            FieldElem(((i + z) % n + 1) as u16)
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if a.is_zero() {
            a
        } else {
            self.mul(a, FieldElem(self.neg_one))
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if a.is_zero() || b.is_zero() {
            return FieldElem::ZERO;
        }
        let n = self.q - 1;
        FieldElem((((a.0 as u32 - 1) + (b.0 as u32 - 1)) % n + 1) as u16)
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let n = self.q - 1;
        Ok(FieldElem(((n - (a.0 as u32 - 1)) % n + 1) as u16))
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// a^n for a signed exponent; pow(0, 0) = 1 by convention.
    pub fn pow(&self, a: FieldElem, n: i64) -> FieldElem {
        if a.is_zero() {
            return if n == 0 { FieldElem::ONE } else { FieldElem::ZERO };
        }
        let m = (self.q - 1) as i64;
        let e = ((a.0 as i64 - 1) * (n % m)).rem_euclid(m);
        FieldElem((e + 1) as u16)
    }

    /// The Frobenius map a -> a^p.
    #[inline]
    pub fn frobenius(&self, a: FieldElem) -> FieldElem {
        self.pow(a, self.spec.p as i64)
    }

    /// Iterates over all labels 0..q.
    pub fn elems(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q as u16).map(FieldElem)
    }
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FieldCtx(q = {} = {}^{}, prim_poly = {:?})",
            self.q, self.spec.p, self.spec.m, self.spec.prim_poly
        )
    }
}
