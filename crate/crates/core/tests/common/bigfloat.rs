//! Binary floating point with a 256-bit mantissa, just enough to evaluate
//! the Bessel power series far past double precision.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

const P: u64 = 256;

#[derive(Clone, Debug)]
pub struct BigF {
    m: BigInt,
    e: i64,
}

fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 600 {
        x *= 2f64.powi(600);
        e -= 600;
    }
    while e < -600 {
        x *= 2f64.powi(-600);
        e += 600;
    }
    x * 2f64.powi(e as i32)
}

impl BigF {
    fn norm(mut self) -> Self {
        let b = self.m.bits();
        if b > P {
            let s = b - P;
            self.m >>= s;
            self.e += s as i64;
        }
        self
    }

    pub fn zero() -> Self {
        BigF { m: BigInt::zero(), e: 0 }
    }

    pub fn int(v: i64) -> Self {
        BigF { m: BigInt::from(v), e: 0 }.norm()
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 1 { -1 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        BigF { m: BigInt::from(mant) * sign, e }
    }

    /// Parse a plain decimal such as "0.5772156649".
    pub fn parse(s: &str) -> Self {
        let (ip, fp) = s.split_once('.').unwrap_or((s, ""));
        let digits: BigInt = format!("{ip}{fp}").parse().unwrap();
        let scale = BigInt::from(10).pow(fp.len() as u32);
        BigF { m: digits, e: 0 }.div(&BigF { m: scale, e: 0 })
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    fn mag(&self) -> i64 {
        self.m.bits() as i64 + self.e
    }

    pub fn add(&self, o: &BigF) -> BigF {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.mag() > o.mag() + P as i64 + 8 {
            return self.clone();
        }
        if o.mag() > self.mag() + P as i64 + 8 {
            return o.clone();
        }
        let (lo, hi) = if self.e <= o.e { (self, o) } else { (o, self) };
        let d = (hi.e - lo.e) as u64;
        BigF { m: &lo.m + (&hi.m << d), e: lo.e }.norm()
    }

    pub fn neg(&self) -> BigF {
        BigF { m: -&self.m, e: self.e }
    }

    pub fn sub(&self, o: &BigF) -> BigF {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &BigF) -> BigF {
        BigF { m: &self.m * &o.m, e: self.e + o.e }.norm()
    }

    pub fn div(&self, o: &BigF) -> BigF {
        assert!(!o.is_zero(), "division by zero");
        let shift = 2 * P;
        BigF { m: (&self.m << shift) / &o.m, e: self.e - o.e - shift as i64 }.norm()
    }

    pub fn div_int(&self, k: u64) -> BigF {
        let shift = (P + 64).saturating_sub(self.m.bits()).max(64);
        BigF { m: (&self.m << shift) / BigInt::from(k), e: self.e - shift as i64 }.norm()
    }

    pub fn to_f64(&self) -> f64 {
        let b = self.m.bits() as i64;
        if b == 0 {
            return 0.0;
        }
        let shift = b - 62;
        if shift > 0 {
            ldexp((&self.m >> shift as u64).to_f64().unwrap(), self.e + shift)
        } else {
            ldexp(self.m.to_f64().unwrap(), self.e)
        }
    }

    pub fn abs(&self) -> BigF {
        BigF { m: self.m.abs(), e: self.e }
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    pub fn lt(&self, o: &BigF) -> bool {
        self.sub(o).is_negative()
    }

    /// Below 2^-(P+32) relative to `scale`.
    pub fn negligible(&self, scale: &BigF) -> bool {
        self.is_zero() || (!scale.is_zero() && self.mag() < scale.mag() - P as i64 - 32)
    }

    pub fn sqrt(&self) -> BigF {
        assert!(!self.is_negative());
        if self.is_zero() {
            return Self::zero();
        }
        let mut s = BigF::from_f64(self.to_f64().sqrt());
        for _ in 0..6 {
            s = s.add(&self.div(&s)).div_int(2);
        }
        s
    }
}

fn atan_series(x: &BigF) -> BigF {
    // x small after reduction
    let x2 = x.mul(x);
    let mut pow = x.clone();
    let mut sum = x.clone();
    let mut k = 1u64;
    loop {
        pow = pow.mul(&x2).neg();
        let t = pow.div_int(2 * k + 1);
        if t.negligible(&sum) {
            break;
        }
        sum = sum.add(&t);
        k += 1;
    }
    sum
}

pub fn pi() -> BigF {
    let a = atan_series(&BigF::int(1).div_int(5));
    let b = atan_series(&BigF::int(1).div_int(239));
    a.mul(&BigF::int(16)).sub(&b.mul(&BigF::int(4)))
}

/// atan(x) for any real x.
pub fn atan(x: &BigF) -> BigF {
    let one = BigF::int(1);
    if one.lt(&x.abs()) {
        let half_pi = pi().div_int(2);
        let r = atan(&one.div(x));
        return if x.is_negative() { half_pi.neg().sub(&r) } else { half_pi.sub(&r) };
    }
    // two half-angle reductions bring |x| below tan(pi/16)
    let mut y = x.clone();
    for _ in 0..2 {
        y = y.div(&one.add(&one.add(&y.mul(&y)).sqrt()));
    }
    atan_series(&y).mul(&BigF::int(4))
}

pub fn ln2() -> BigF {
    let mut sum = BigF::zero();
    let mut pow = BigF::int(1);
    let mut k = 1u64;
    loop {
        pow = pow.div_int(2);
        let t = pow.div_int(k);
        if k > 8 && t.negligible(&sum) {
            break;
        }
        sum = sum.add(&t);
        k += 1;
    }
    sum
}

/// Natural log of a positive value.
pub fn ln(x: &BigF) -> BigF {
    assert!(!x.is_negative() && !x.is_zero());
    // x = m 2^e with m in [1, 2)
    let b = x.m.bits() as i64;
    let e2 = x.e + b - 1;
    let m = BigF { m: x.m.clone(), e: -(b - 1) };
    let one = BigF::int(1);
    let u = m.sub(&one).div(&m.add(&one));
    let u2 = u.mul(&u);
    let mut pow = u.clone();
    let mut sum = u.clone();
    let mut k = 1u64;
    loop {
        pow = pow.mul(&u2);
        let t = pow.div_int(2 * k + 1);
        if t.negligible(&sum) {
            break;
        }
        sum = sum.add(&t);
        k += 1;
    }
    sum.mul(&BigF::int(2)).add(&ln2().mul(&BigF::int(e2)))
}

pub fn euler_gamma() -> BigF {
    BigF::parse("0.577215664901532860606512090082402431042159335939923598805767234884867726777664670936947063")
}

#[derive(Clone, Debug)]
pub struct BigC {
    pub re: BigF,
    pub im: BigF,
}

impl BigC {
    pub fn new(re: BigF, im: BigF) -> Self {
        BigC { re, im }
    }
    pub fn from_f64(re: f64, im: f64) -> Self {
        BigC { re: BigF::from_f64(re), im: BigF::from_f64(im) }
    }
    pub fn real(re: BigF) -> Self {
        BigC { re, im: BigF::zero() }
    }
    pub fn add(&self, o: &BigC) -> BigC {
        BigC::new(self.re.add(&o.re), self.im.add(&o.im))
    }
    pub fn sub(&self, o: &BigC) -> BigC {
        BigC::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }
    pub fn neg(&self) -> BigC {
        BigC::new(self.re.neg(), self.im.neg())
    }
    pub fn mul(&self, o: &BigC) -> BigC {
        BigC::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }
    pub fn scale(&self, s: &BigF) -> BigC {
        BigC::new(self.re.mul(s), self.im.mul(s))
    }
    pub fn div_int(&self, k: u64) -> BigC {
        BigC::new(self.re.div_int(k), self.im.div_int(k))
    }
    pub fn inv(&self) -> BigC {
        let d = self.re.mul(&self.re).add(&self.im.mul(&self.im));
        BigC::new(self.re.div(&d), self.im.neg().div(&d))
    }
    pub fn times_i(&self) -> BigC {
        BigC::new(self.im.neg(), self.re.clone())
    }
    pub fn norm_sq(&self) -> BigF {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
    pub fn negligible(&self, scale: &BigC) -> bool {
        let s = if scale.re.abs().lt(&scale.im.abs()) { &scale.im } else { &scale.re };
        self.re.negligible(s) && self.im.negligible(s)
    }
    /// Principal logarithm; z must be off (-inf, 0].
    pub fn ln(&self) -> BigC {
        let modulus = ln(&self.norm_sq()).div_int(2);
        let arg = if self.re.is_zero() {
            let hp = pi().div_int(2);
            if self.im.is_negative() { hp.neg() } else { hp }
        } else {
            let base = atan(&self.im.div(&self.re));
            if self.re.is_negative() {
                if self.im.is_negative() { base.sub(&pi()) } else { base.add(&pi()) }
            } else {
                base
            }
        };
        BigC::new(modulus, arg)
    }
    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

fn powu(z: &BigC, n: u32) -> BigC {
    let mut r = BigC::real(BigF::int(1));
    for _ in 0..n {
        r = r.mul(z);
    }
    r
}

/// J_n(z) from its power series.
pub fn bessel_j(n: u32, z: &BigC) -> BigC {
    let half = z.scale(&BigF::int(1).div_int(2));
    let mut lead = powu(&half, n);
    for k in 1..=n as u64 {
        lead = lead.div_int(k);
    }
    let q = half.mul(&half).neg();
    let mut term = lead.clone();
    let mut sum = lead;
    for k in 1..2000u64 {
        term = term.mul(&q).div_int(k * (n as u64 + k));
        sum = sum.add(&term);
        if term.negligible(&sum) && k > 4 {
            break;
        }
    }
    sum
}

/// Y_n(z) from the finite sum plus logarithmic series.
pub fn bessel_y(n: u32, z: &BigC) -> BigC {
    let pi = pi();
    let gamma = euler_gamma();
    let half = z.scale(&BigF::int(1).div_int(2));
    let q = half.mul(&half);
    let jn = bessel_j(n, z);
    let mut finite = BigC::real(BigF::zero());
    if n > 0 {
        let inv_half = half.inv();
        for k in 0..n {
            let mut c = BigF::int(1);
            for i in 1..=(n - k - 1) as i64 {
                c = c.mul(&BigF::int(i));
            }
            for i in 1..=k as u64 {
                c = c.div_int(i);
            }
            finite = finite.add(&powu(&q, k).scale(&c));
        }
        finite = finite.mul(&powu(&inv_half, n)).scale(&BigF::int(1).div(&pi)).neg();
    }
    let log_part = half.ln().mul(&jn).scale(&BigF::int(2).div(&pi));
    let mut lead = powu(&half, n);
    for k in 1..=n as u64 {
        lead = lead.div_int(k);
    }
    let mut psi_a = gamma.neg();
    let mut psi_b = gamma.neg();
    for p in 1..=n as u64 {
        psi_b = psi_b.add(&BigF::int(1).div_int(p));
    }
    let mq = q.neg();
    let mut term = lead;
    let mut sum = term.scale(&psi_a.add(&psi_b));
    for k in 1..2000u64 {
        psi_a = psi_a.add(&BigF::int(1).div_int(k));
        psi_b = psi_b.add(&BigF::int(1).div_int(n as u64 + k));
        term = term.mul(&mq).div_int(k * (n as u64 + k));
        let t = term.scale(&psi_a.add(&psi_b));
        sum = sum.add(&t);
        if t.negligible(&sum) && k > 4 {
            break;
        }
    }
    finite.add(&log_part).sub(&sum.scale(&BigF::int(1).div(&pi)))
}

/// K_0(x) for real x > 0 from the modified-Bessel series.
pub fn bessel_k0(x: &BigF) -> BigF {
    let half = x.div_int(2);
    let q = half.mul(&half);
    let mut term = BigF::int(1);
    let mut i0 = BigF::int(1);
    let mut tail = BigF::zero();
    let mut harmonic = BigF::zero();
    for k in 1..2000u64 {
        term = term.mul(&q).div_int(k * k);
        harmonic = harmonic.add(&BigF::int(1).div_int(k));
        i0 = i0.add(&term);
        let t = term.mul(&harmonic);
        tail = tail.add(&t);
        if t.negligible(&tail) && k > 4 {
            break;
        }
    }
    ln(&half).add(&euler_gamma()).mul(&i0).neg().add(&tail)
}
