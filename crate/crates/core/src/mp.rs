//! Thin helpers over MPFR floats used as the configurable-precision scalar.

use rug::float::Constant;
use rug::ops::Pow;
pub use rug::Float;

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 256;

/// Float with value `v` at `prec` bits.
pub fn fl(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Float from a decimal string, exact to the working precision.
pub fn parse(prec: u32, s: &str) -> Option<Float> {
    Float::parse(s.trim()).ok().map(|p| Float::with_val(prec, p))
}

/// Decimal string that round-trips bit-exactly at the float's precision.
pub fn to_decimal(x: &Float) -> String {
    x.to_string_radix(10, None)
}

/// `2^(-bits)` as an f64, clamped to the smallest positive normal.
pub fn ulp_scale(bits: u32) -> f64 {
    2f64.powi(-(bits.min(1000) as i32)).max(f64::MIN_POSITIVE)
}

/// Principal value of an angle in (-pi, pi].
pub fn wrap_angle(x: &mut Float) {
    let prec = x.prec();
    let p = pi(prec);
    let two_pi = Float::with_val(prec, &p * 2u32);
    let neg_p = Float::with_val(prec, -&p);
    while *x <= neg_p {
        *x += &two_pi;
    }
    while *x > p {
        *x -= &two_pi;
    }
}

/// `x^e` for x > 0 at the precision of x.
pub fn powf(x: &Float, e: f64) -> Float {
    let prec = x.prec();
    Float::with_val(prec, x.pow(Float::with_val(prec, e)))
}

/// A complex number with MPFR parts, enough arithmetic for the special functions.
#[derive(Clone, Debug)]
pub struct MpComplex {
    pub re: Float,
    pub im: Float,
}

impl MpComplex {
    pub fn new(re: Float, im: Float) -> Self {
        MpComplex { re, im }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        MpComplex::new(fl(prec, re), fl(prec, im))
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn add(&self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        MpComplex::new(
            Float::with_val(p, &self.re + &o.re),
            Float::with_val(p, &self.im + &o.im),
        )
    }

    pub fn sub(&self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        MpComplex::new(
            Float::with_val(p, &self.re - &o.re),
            Float::with_val(p, &self.im - &o.im),
        )
    }

    pub fn add_real(&self, r: &Float) -> MpComplex {
        let p = self.prec();
        MpComplex::new(Float::with_val(p, &self.re + r), self.im.clone())
    }

    pub fn scale(&self, r: &Float) -> MpComplex {
        let p = self.prec();
        MpComplex::new(Float::with_val(p, &self.re * r), Float::with_val(p, &self.im * r))
    }

    pub fn mul(&self, o: &MpComplex) -> MpComplex {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * &o.re) - Float::with_val(p, &self.im * &o.im);
        let im = Float::with_val(p, &self.re * &o.im) + Float::with_val(p, &self.im * &o.re);
        MpComplex::new(re, im)
    }

    pub fn recip(&self) -> MpComplex {
        let p = self.prec();
        let d = Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref());
        MpComplex::new(Float::with_val(p, &self.re / &d), Float::with_val(p, -&self.im) / &d)
    }

    pub fn div(&self, o: &MpComplex) -> MpComplex {
        self.mul(&o.recip())
    }

    /// Principal logarithm.
    pub fn ln(&self) -> MpComplex {
        let p = self.prec();
        let r = self.abs();
        MpComplex::new(r.ln(), Float::with_val(p, self.im.atan2_ref(&self.re)))
    }
}
