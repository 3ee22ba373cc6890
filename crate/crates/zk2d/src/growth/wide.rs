//! Wide-exponent software float for the growth certifier.
//!
//! The envelope constant `(2 K1 + 1)^N` reaches `2^(1e17)` on the
//! verification grid — beyond f64 and beyond big-float libraries with
//! 32-bit exponents — while every compared quantity has at least a
//! factor-2 margin. A positive value is stored as `m * 2^e` with
//! `m in [1, 2)` and a 64-bit exponent: unlimited range, f64-mantissa
//! precision (relative error per op ~1e-16, vastly below the margins).

/// Positive extended-range float `m * 2^e`, `m in [1, 2)`. Zero is
/// represented by `m = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WideFloat {
    m: f64,
    e: i64,
}

impl WideFloat {
    pub const ZERO: WideFloat = WideFloat { m: 0.0, e: 0 };
    pub const ONE: WideFloat = WideFloat { m: 1.0, e: 0 };

    /// From a finite non-negative f64.
    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite() && x >= 0.0, "WideFloat needs finite x >= 0, got {x}");
        if x == 0.0 {
            return Self::ZERO;
        }
        let (m, e) = frexp(x);
        // frexp gives m in [0.5, 1); normalize to [1, 2)
        Self { m: m * 2.0, e: e - 1 }
    }

    fn normalized(m: f64, e: i64) -> Self {
        Self::checked_normalized(m, e).expect("exponent overflow")
    }

    fn checked_normalized(m: f64, e: i64) -> Option<Self> {
        if m == 0.0 {
            return Some(Self::ZERO);
        }
        let (f, de) = frexp(m);
        Some(Self {
            m: f * 2.0,
            e: e.checked_add(de)?.checked_sub(1)?,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.m == 0.0
    }

    /// Value as f64; infinite when out of range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else if self.e > 1030 {
            f64::INFINITY
        } else if self.e < -1070 {
            0.0
        } else {
            self.m * (self.e as f64).exp2()
        }
    }

    pub fn log2(&self) -> f64 {
        assert!(!self.is_zero(), "log2 of zero");
        self.e as f64 + self.m.log2()
    }

    pub fn ln(&self) -> f64 {
        self.log2() * std::f64::consts::LN_2
    }

    pub fn log10(&self) -> f64 {
        self.log2() * std::f64::consts::LOG10_2
    }

    pub fn mul(&self, rhs: &WideFloat) -> WideFloat {
        Self::normalized(self.m * rhs.m, self.e + rhs.e)
    }

    pub fn div(&self, rhs: &WideFloat) -> WideFloat {
        assert!(!rhs.is_zero(), "division by zero");
        Self::normalized(self.m / rhs.m, self.e - rhs.e)
    }

    pub fn add(&self, rhs: &WideFloat) -> WideFloat {
        if self.is_zero() {
            return *rhs;
        }
        if rhs.is_zero() {
            return *self;
        }
        let (hi, lo) = if self.e >= rhs.e { (self, rhs) } else { (rhs, self) };
        let shift = hi.e - lo.e;
        if shift > 64 {
            return *hi;
        }
        Self::normalized(hi.m + lo.m * (-(shift as f64)).exp2(), hi.e)
    }

    pub fn max(&self, rhs: &WideFloat) -> WideFloat {
        if self.ge(rhs) {
            *self
        } else {
            *rhs
        }
    }

    pub fn ge(&self, rhs: &WideFloat) -> bool {
        if rhs.is_zero() {
            return true;
        }
        if self.is_zero() {
            return false;
        }
        match self.e.cmp(&rhs.e) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => self.m >= rhs.m,
        }
    }

    /// Integer power by binary exponentiation; exponent arithmetic is
    /// exact in i64 (errors if it would overflow).
    pub fn powi(&self, n: u64) -> Option<WideFloat> {
        if n == 0 {
            return Some(Self::ONE);
        }
        if self.is_zero() {
            return Some(Self::ZERO);
        }
        let mut base = *self;
        let mut acc = Self::ONE;
        let mut k = n;
        loop {
            if k & 1 == 1 {
                acc = Self::checked_normalized(acc.m * base.m, acc.e.checked_add(base.e)?)?;
            }
            k >>= 1;
            if k == 0 {
                break;
            }
            base = Self::checked_normalized(base.m * base.m, base.e.checked_mul(2)?)?;
        }
        Some(acc)
    }

    /// Real power `self^p` through base-2 logs.
    pub fn powf(&self, p: f64) -> WideFloat {
        if self.is_zero() {
            assert!(p > 0.0, "0^p needs p > 0");
            return Self::ZERO;
        }
        let l = self.log2() * p;
        let e = l.floor();
        Self::normalized((l - e).exp2(), e as i64)
    }
}

fn frexp(x: f64) -> (f64, i64) {
    // decompose finite positive x as m * 2^e, m in [0.5, 1)
    let bits = x.to_bits();
    let exp_field = ((bits >> 52) & 0x7ff) as i64;
    if exp_field == 0 {
        // subnormal: scale up first
        let scaled = x * (2f64).powi(64);
        let (m, e) = frexp(scaled);
        return (m, e - 64);
    }
    let e = exp_field - 1022;
    let m = f64::from_bits((bits & !(0x7ffu64 << 52)) | (1022u64 << 52));
    (m, e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use astro_float::{BigFloat, Consts, RoundingMode};

    #[test]
    fn round_trips_and_ordering() {
        for x in [1.0, 0.5, 3.25, 1e-12, 7.3e200, 4.9e-300] {
            let w = WideFloat::from_f64(x);
            assert!((w.to_f64() - x).abs() <= 1e-15 * x, "{x}");
        }
        let a = WideFloat::from_f64(3.0);
        let b = WideFloat::from_f64(2.9999);
        assert!(a.ge(&b) && !b.ge(&a));
    }

    #[test]
    fn arithmetic_matches_f64_in_range() {
        let mut state = 1u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 * 100.0 + 1e-3
        };
        for _ in 0..2000 {
            let (x, y) = (next(), next());
            let (a, b) = (WideFloat::from_f64(x), WideFloat::from_f64(y));
            assert!((a.mul(&b).to_f64() - x * y).abs() <= 1e-12 * (x * y));
            assert!((a.add(&b).to_f64() - (x + y)).abs() <= 1e-12 * (x + y));
            assert!((a.div(&b).to_f64() - x / y).abs() <= 1e-12 * (x / y));
            let p = next() / 25.0;
            assert!((a.powf(p).to_f64() - x.powf(p)).abs() <= 1e-12 * x.powf(p));
        }
    }

    #[test]
    fn powi_matches_bigfloat_oracle() {
        // cross-check binary exponentiation against a 128-bit big-float
        let mut cc = Consts::new().unwrap();
        let _ = &mut cc;
        for (base, n) in [(3.0, 41u64), (21.0, 100), (1.2, 977), (7.5, 300)] {
            let w = WideFloat::from_f64(base).powi(n).unwrap();
            let b = BigFloat::from_f64(base, 128).powi(n as usize, 128, RoundingMode::ToEven);
            let oracle: f64 = format!("{}", b.log10(128, RoundingMode::ToEven, &mut cc))
                .parse()
                .unwrap();
            assert!(
                (w.log10() - oracle).abs() <= 1e-16 * (n as f64) * oracle.abs().max(1.0) + 1e-12,
                "{base}^{n}: {} vs {oracle}",
                w.log10()
            );
        }
    }

    #[test]
    fn huge_exponents_no_overflow() {
        let w = WideFloat::from_f64(21.0).powi(34_000_000_000_000_000).unwrap();
        assert!(w.to_f64().is_infinite());
        assert!(w.log10() > 1e16);
        // and exponent overflow is reported, not wrapped
        let giant = WideFloat { m: 1.5, e: i64::MAX / 2 };
        assert!(giant.powi(4).is_none());
    }

    #[test]
    fn add_with_large_scale_gap() {
        let big = WideFloat::from_f64(1e30);
        let tiny = WideFloat::from_f64(1.0);
        let s = big.add(&tiny);
        assert_eq!(s.to_f64(), 1e30);
    }
}
