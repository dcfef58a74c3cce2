//! Determinants in configurable precision: LU, Toeplitz and Toeplitz+Hankel.

use std::fmt;

use rug::{Assign, Float};

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::mp;

/// Signed logarithm `sign · e^{log_abs}`; `sign == 0` encodes the value 0.
#[derive(Clone, Debug, PartialEq)]
pub struct LogValue {
    pub log_abs: Float,
    pub sign: i8,
}

impl LogValue {
    pub fn zero(prec: u32) -> Self {
        LogValue { log_abs: mp::fl(prec, 0.0), sign: 0 }
    }

    pub fn one(prec: u32) -> Self {
        LogValue { log_abs: mp::fl(prec, 0.0), sign: 1 }
    }

    pub fn from_float(x: &Float) -> Self {
        let prec = x.prec();
        if x.is_zero() {
            return LogValue::zero(prec);
        }
        LogValue { log_abs: Float::with_val(prec, x.abs_ref()).ln(), sign: if *x > 0 { 1 } else { -1 } }
    }

    pub fn from_log(log_abs: Float, sign: i8) -> Self {
        LogValue { log_abs, sign }
    }

    pub fn prec(&self) -> u32 {
        self.log_abs.prec()
    }

    pub fn mul(&self, o: &LogValue) -> LogValue {
        let p = self.prec().max(o.prec());
        LogValue { log_abs: Float::with_val(p, &self.log_abs + &o.log_abs), sign: self.sign * o.sign }
    }

    pub fn div(&self, o: &LogValue) -> Result<LogValue> {
        if o.sign == 0 {
            return Err(Error::InvalidParameter("division by zero log-value".into()));
        }
        let p = self.prec().max(o.prec());
        Ok(LogValue { log_abs: Float::with_val(p, &self.log_abs - &o.log_abs), sign: self.sign * o.sign })
    }

    /// Multiply by `e^{x}`.
    pub fn mul_exp(&self, x: &Float) -> LogValue {
        LogValue { log_abs: Float::with_val(self.prec(), &self.log_abs + x), sign: self.sign }
    }

    /// Positive square root; errors unless the value is positive.
    pub fn sqrt(&self) -> Result<LogValue> {
        if self.sign != 1 {
            return Err(Error::Positivity(format!("square root of a value with sign {}", self.sign)));
        }
        Ok(LogValue { log_abs: Float::with_val(self.prec(), &self.log_abs / 2u32), sign: 1 })
    }

    pub fn log_f64(&self) -> f64 {
        self.log_abs.to_f64()
    }

    /// The represented value as f64 (may under- or overflow).
    pub fn value_f64(&self) -> f64 {
        self.sign as f64 * self.log_abs.to_f64().exp()
    }

    /// The represented value at full precision.
    pub fn value(&self) -> Float {
        let v = Float::with_val(self.prec(), self.log_abs.exp_ref());
        match self.sign {
            0 => mp::fl(self.prec(), 0.0),
            1 => v,
            _ => -v,
        }
    }

    /// `|self/other - 1|`, infinite when signs differ.
    pub fn rel_diff(&self, o: &LogValue) -> f64 {
        if self.sign != o.sign {
            return f64::INFINITY;
        }
        if self.sign == 0 {
            return 0.0;
        }
        let p = self.prec().max(o.prec());
        Float::with_val(p, &self.log_abs - &o.log_abs).exp_m1().abs().to_f64()
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·exp({})", self.sign, self.log_abs.to_f64())
    }
}

/// The four Toeplitz+Hankel kinds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum THKind {
    /// `g_{j-k} + g_{j+k}`
    PlusK,
    /// `g_{j-k} - g_{j+k+2}`
    MinusK2,
    /// `g_{j-k} - g_{j+k+1}`
    MinusK1,
    /// `g_{j-k} + g_{j+k+1}`
    PlusK1,
}

impl THKind {
    fn shift_sign(self) -> (i64, i32) {
        match self {
            THKind::PlusK => (0, 1),
            THKind::MinusK2 => (2, -1),
            THKind::MinusK1 => (1, -1),
            THKind::PlusK1 => (1, 1),
        }
    }

    /// Largest moment index used by the `n × n` matrix.
    pub fn max_index(self, n: usize) -> usize {
        if n == 0 {
            return 0;
        }
        2 * (n - 1) + self.shift_sign().0 as usize
    }
}

pub type Matrix = Vec<Vec<Float>>;

/// Signed log-determinant by LU with partial pivoting at `prec` bits.
pub fn det_lu(matrix: &[Vec<Float>], prec: u32) -> LogValue {
    let n = matrix.len();
    assert!(matrix.iter().all(|r| r.len() == n), "det_lu needs a square matrix");
    if n == 0 {
        return LogValue::one(prec);
    }
    let mut a: Matrix = matrix.iter().map(|r| r.iter().map(|x| Float::with_val(prec, x)).collect()).collect();
    let mut sign: i8 = 1;
    let mut log_abs = mp::fl(prec, 0.0);
    let mut f = Float::new(prec);
    let mut tmp = Float::new(prec);
    for k in 0..n {
        let mut piv = k;
        for i in k + 1..n {
            if a[i][k].clone().abs() > a[piv][k].clone().abs() {
                piv = i;
            }
        }
        if a[piv][k].is_zero() {
            return LogValue::zero(prec);
        }
        if piv != k {
            a.swap(piv, k);
            sign = -sign;
        }
        if a[k][k] < 0 {
            sign = -sign;
        }
        log_abs += Float::with_val(prec, a[k][k].abs_ref()).ln();
        let (top, rest) = a.split_at_mut(k + 1);
        let pivot_row = &top[k];
        for row in rest.iter_mut() {
            if row[k].is_zero() {
                continue;
            }
            f.assign(&row[k] / &pivot_row[k]);
            for c in k + 1..n {
                tmp.assign(&f * &pivot_row[c]);
                row[c] -= &tmp;
            }
        }
    }
    LogValue { log_abs, sign }
}

/// Solve `A x = b` by LU with partial pivoting.
pub fn lu_solve(matrix: &[Vec<Float>], rhs: &[Float], prec: u32) -> Result<Vec<Float>> {
    let n = matrix.len();
    let mut a: Matrix = matrix.iter().map(|r| r.iter().map(|x| Float::with_val(prec, x)).collect()).collect();
    let mut b: Vec<Float> = rhs.iter().map(|x| Float::with_val(prec, x)).collect();
    let mut tmp = Float::new(prec);
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&i, &j| a[i][k].clone().abs().partial_cmp(&a[j][k].clone().abs()).unwrap())
            .unwrap();
        if a[piv][k].is_zero() {
            return Err(Error::IllConditioned("singular matrix".into()));
        }
        a.swap(piv, k);
        b.swap(piv, k);
        for i in k + 1..n {
            let f = Float::with_val(prec, &a[i][k] / &a[k][k]);
            for c in k + 1..n {
                tmp.assign(&f * &a[k][c]);
                a[i][c] -= &tmp;
            }
            tmp.assign(&f * &b[k]);
            b[i] -= &tmp;
        }
    }
    let mut x = vec![Float::new(prec); n];
    for i in (0..n).rev() {
        let mut s = b[i].clone();
        for c in i + 1..n {
            tmp.assign(&a[i][c] * &x[c]);
            s -= &tmp;
        }
        x[i] = s / &a[i][i];
    }
    Ok(x)
}

/// `(g_{j-k})_{j,k<N}`.
pub fn toeplitz_matrix(ms: &MomentSequence, big_n: usize, prec: u32) -> Result<Matrix> {
    if big_n > 0 {
        ms.require(big_n - 1)?;
    }
    Ok((0..big_n as i64)
        .map(|j| (0..big_n as i64).map(|k| Float::with_val(prec, ms.get(j - k))).collect())
        .collect())
}

/// The `n × n` Toeplitz+Hankel matrix of the given kind.
pub fn th_matrix(ms: &MomentSequence, n: usize, kind: THKind, prec: u32) -> Result<Matrix> {
    ms.require(kind.max_index(n))?;
    let (q, s) = kind.shift_sign();
    Ok((0..n as i64)
        .map(|j| {
            (0..n as i64)
                .map(|k| {
                    let t = Float::with_val(prec, ms.get(j - k));
                    if s > 0 {
                        t + ms.get(j + k + q)
                    } else {
                        t - ms.get(j + k + q)
                    }
                })
                .collect()
        })
        .collect())
}

pub fn toeplitz_det(ms: &MomentSequence, big_n: usize, prec: u32) -> Result<LogValue> {
    Ok(det_lu(&toeplitz_matrix(ms, big_n, prec)?, prec))
}

pub fn th_det(ms: &MomentSequence, n: usize, kind: THKind, prec: u32) -> Result<LogValue> {
    Ok(det_lu(&th_matrix(ms, n, kind, prec)?, prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cofactor(m: &[Vec<f64>]) -> f64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|c| {
                let minor: Vec<Vec<f64>> =
                    m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != c).map(|(_, v)| *v).collect()).collect();
                let s = if c % 2 == 0 { 1.0 } else { -1.0 };
                s * m[0][c] * cofactor(&minor)
            })
            .collect::<Vec<_>>()
            .iter()
            .sum()
    }

    fn to_mp(m: &[Vec<f64>], prec: u32) -> Matrix {
        m.iter().map(|r| r.iter().map(|&v| mp::fl(prec, v)).collect()).collect()
    }

    #[test]
    fn small_determinants() {
        let id: Vec<Vec<f64>> = (0..5).map(|i| (0..5).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
        let d = det_lu(&to_mp(&id, 128), 128);
        assert_eq!(d.sign, 1);
        assert!(d.log_abs.is_zero());
        let d = det_lu(&to_mp(&[vec![2.0, 0.0], vec![0.0, 3.0]], 128), 128);
        assert!((d.log_f64() - 6f64.ln()).abs() < 1e-15);
        let d = det_lu(&to_mp(&[vec![1.0, 2.0], vec![2.0, 4.0]], 128), 128);
        assert_eq!(d.sign, 0);
        let d = det_lu(&to_mp(&[vec![0.0, 1.0], vec![1.0, 0.0]], 128), 128);
        assert_eq!(d.sign, -1);
    }

    #[test]
    fn matches_cofactor_oracle() {
        let mut state = 12345u64;
        let mut rnd = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        for _ in 0..5 {
            let m: Vec<Vec<f64>> = (0..8).map(|_| (0..8).map(|_| rnd()).collect()).collect();
            let exact = cofactor(&m);
            let d = det_lu(&to_mp(&m, 256), 256);
            assert!((d.value_f64() / exact - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn th_one_by_one() {
        let ms = MomentSequence::from_f64(&[0.7, 0.2, -0.1], 128);
        let v = |k| th_det(&ms, 1, k, 128).unwrap().value_f64();
        assert!((v(THKind::PlusK) - 1.4).abs() < 1e-15);
        assert!((v(THKind::MinusK1) - 0.5).abs() < 1e-15);
        assert!((v(THKind::PlusK1) - 0.9).abs() < 1e-15);
        assert!((v(THKind::MinusK2) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn identity_symbol_th() {
        let ms = MomentSequence::from_f64(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], 128);
        for n in 1..=6 {
            for kind in [THKind::PlusK, THKind::MinusK2, THKind::MinusK1, THKind::PlusK1] {
                let m = th_matrix(&ms, n, kind, 128).unwrap();
                let mf: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|x| x.to_f64()).collect()).collect();
                let d = th_det(&ms, n, kind, 128).unwrap().value_f64();
                assert!((d - cofactor(&mf)).abs() < 1e-14, "{kind:?} n={n}");
            }
            assert!(toeplitz_det(&ms, n, 128).unwrap().log_abs.is_zero());
        }
        assert!(th_det(&ms, 7, THKind::MinusK2, 128).is_err());
    }

    #[test]
    fn lu_solve_roundtrip() {
        let a = to_mp(&[vec![4.0, 1.0, 0.5], vec![1.0, 3.0, -1.0], vec![0.5, -1.0, 2.0]], 128);
        let b: Vec<Float> = [1.0, 2.0, 3.0].iter().map(|&v| mp::fl(128, v)).collect();
        let x = lu_solve(&a, &b, 128).unwrap();
        for i in 0..3 {
            let mut s = mp::fl(128, 0.0);
            for j in 0..3 {
                s += Float::with_val(128, &a[i][j] * &x[j]);
            }
            assert!((s.to_f64() - b[i].to_f64()).abs() < 1e-30);
        }
    }
}
