//! Working-precision context, dense linear algebra over MPFR floats, and
//! sign-based root bracketing.

use std::cmp::Ordering;

use rug::ops::PowAssign;
use rug::{Assign, Float};
use thiserror::Error;

/// Smallest precision accepted for series arithmetic.
pub const MIN_DIGITS: u32 = 15;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("insufficient precision: {digits} digits requested, at least {MIN_DIGITS} required")]
    InsufficientPrecision { digits: u32 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular system: zero pivot in column {pivot}")]
    Singular { pivot: usize },
    #[error("no sign change on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },
    #[error("function value is not finite at x = {at}")]
    Evaluation { at: f64 },
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// Decimal working precision and the MPFR mantissa width that carries it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    digits: u32,
    bits: u32,
}

pub fn make_context(digits: u32) -> Result<PrecisionContext, NumericsError> {
    if digits < MIN_DIGITS {
        return Err(NumericsError::InsufficientPrecision { digits });
    }
    let bits = (f64::from(digits) * LOG2_10).ceil() as u32;
    Ok(PrecisionContext { digits, bits })
}

impl PrecisionContext {
    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// A float at this precision holding `v` (rounded to nearest).
    pub fn float<T>(&self, v: T) -> Float
    where
        Float: Assign<T>,
    {
        Float::with_val(self.bits, v)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits)
    }

    /// Parse a decimal string at this precision.
    pub fn parse(&self, s: &str) -> Result<Float, NumericsError> {
        Float::parse(s)
            .map(|v| Float::with_val(self.bits, v))
            .map_err(|e| NumericsError::Argument(format!("cannot parse {s:?}: {e}")))
    }

    /// `10^e` at this precision; used for tolerances such as `10^(10 - digits)`.
    pub fn pow10(&self, e: i32) -> Float {
        let mut x = self.float(10);
        x.pow_assign(e);
        x
    }
}

/// Dense row-major matrix of high-precision reals.
#[derive(Debug, Clone, PartialEq)]
pub struct HPMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Float>,
}

impl HPMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Float>) -> Result<Self, NumericsError> {
        if rows == 0 || cols == 0 {
            return Err(NumericsError::Dimension("empty matrix".into()));
        }
        if entries.len() != rows * cols {
            return Err(NumericsError::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize, ctx: &PrecisionContext) -> Self {
        Self { rows, cols, entries: vec![ctx.zero(); rows * cols] }
    }

    pub fn from_f64(rows: usize, cols: usize, data: &[f64], ctx: &PrecisionContext) -> Result<Self, NumericsError> {
        Self::new(rows, cols, data.iter().map(|&v| ctx.float(v)).collect())
    }

    pub fn identity(n: usize, ctx: &PrecisionContext) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m.entries[i * n + i].assign(1);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Float {
        &self.entries[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut Float {
        &mut self.entries[r * self.cols + c]
    }

    pub fn entries(&self) -> &[Float] {
        &self.entries
    }

    fn ensure_square(&self) -> Result<(), NumericsError> {
        if self.rows != self.cols {
            return Err(NumericsError::Dimension(format!("expected a square matrix, got {}x{}", self.rows, self.cols)));
        }
        Ok(())
    }
}

/// Determinant in overflow-safe form.
#[derive(Debug, Clone, PartialEq)]
pub struct LogDet {
    pub sign: i8,
    /// Natural log of |det|; `-inf` when `sign == 0`.
    pub log_magnitude: Float,
}

impl LogDet {
    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }
}

/// Gaussian elimination with partial pivoting, in place. Returns the row
/// permutation parity, or the column of the first exactly zero pivot.
fn lu_in_place(a: &mut HPMatrix, perm: &mut [usize], ctx: &PrecisionContext) -> Result<i8, usize> {
    let n = a.rows;
    let mut parity = 1i8;
    let mut factor = ctx.zero();
    let mut t = ctx.zero();
    for c in 0..n {
        let mut piv = c;
        for r in c + 1..n {
            if a.get(r, c).cmp_abs(a.get(piv, c)) == Some(Ordering::Greater) {
                piv = r;
            }
        }
        if a.get(piv, c).is_zero() {
            return Err(c);
        }
        if piv != c {
            for k in 0..n {
                a.entries.swap(piv * n + k, c * n + k);
            }
            perm.swap(piv, c);
            parity = -parity;
        }
        for r in c + 1..n {
            if a.get(r, c).is_zero() {
                continue;
            }
            factor.assign(a.get(r, c) / a.get(c, c));
            for k in c + 1..n {
                t.assign(&factor * a.get(c, k));
                *a.get_mut(r, k) -= &t;
            }
            a.get_mut(r, c).assign(&factor);
        }
    }
    Ok(parity)
}

pub fn lu_logdet(m: &HPMatrix, ctx: &PrecisionContext) -> Result<LogDet, NumericsError> {
    m.ensure_square()?;
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..m.rows).collect();
    let parity = match lu_in_place(&mut a, &mut perm, ctx) {
        Ok(p) => p,
        Err(_) => {
            return Ok(LogDet { sign: 0, log_magnitude: ctx.float(f64::NEG_INFINITY) });
        }
    };
    let mut sign = parity;
    let mut log = ctx.zero();
    for i in 0..m.rows {
        let d = a.get(i, i);
        if d.is_sign_negative() {
            sign = -sign;
        }
        log += Float::with_val(ctx.bits, d.abs_ref()).ln();
    }
    Ok(LogDet { sign, log_magnitude: log })
}

pub fn linear_solve(m: &HPMatrix, b: &[Float], ctx: &PrecisionContext) -> Result<Vec<Float>, NumericsError> {
    m.ensure_square()?;
    let n = m.rows;
    if b.len() != n {
        return Err(NumericsError::Dimension(format!("right-hand side has {} entries, expected {n}", b.len())));
    }
    let mut a = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    lu_in_place(&mut a, &mut perm, ctx).map_err(|pivot| NumericsError::Singular { pivot })?;

    let mut x: Vec<Float> = perm.iter().map(|&p| ctx.float(&b[p])).collect();
    let mut t = ctx.zero();
    for i in 0..n {
        for k in 0..i {
            t.assign(a.get(i, k) * &x[k]);
            x[i] -= &t;
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            t.assign(a.get(i, k) * &x[k]);
            x[i] -= &t;
        }
        x[i] /= a.get(i, i);
    }
    Ok(x)
}

/// Outcome of a bisection, with the number of function evaluations spent
/// inside the loop (endpoint evaluations excluded).
#[derive(Debug, Clone)]
pub struct Bisection {
    pub root: Float,
    pub iterations: u32,
}

/// Bisection on a sign change. Only the sign of `f` is consulted, so `f` may
/// be arbitrarily scaled. The result lies within `tol` of a sign change.
pub fn bracketed_root<F>(
    f: F,
    lo: &Float,
    hi: &Float,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<Float, NumericsError>
where
    F: FnMut(&Float) -> Float,
{
    bisect(f, lo, hi, tol, ctx).map(|b| b.root)
}

pub fn bisect<F>(
    mut f: F,
    lo: &Float,
    hi: &Float,
    tol: &Float,
    ctx: &PrecisionContext,
) -> Result<Bisection, NumericsError>
where
    F: FnMut(&Float) -> Float,
{
    if lo >= hi {
        return Err(NumericsError::Argument("bisection needs lo < hi".into()));
    }
    if !tol.is_sign_positive() || tol.is_zero() {
        return Err(NumericsError::Argument("bisection needs tol > 0".into()));
    }
    let eval = |f: &mut F, x: &Float| -> Result<Option<Ordering>, NumericsError> {
        let v = f(x);
        if !v.is_finite() {
            return Err(NumericsError::Evaluation { at: x.to_f64() });
        }
        Ok(v.cmp0())
    };
    let mut a = ctx.float(lo);
    let mut b = ctx.float(hi);
    let sa = eval(&mut f, &a)?;
    let sb = eval(&mut f, &b)?;
    if sa == Some(Ordering::Equal) {
        return Ok(Bisection { root: a, iterations: 0 });
    }
    if sb == Some(Ordering::Equal) {
        return Ok(Bisection { root: b, iterations: 0 });
    }
    if sa == sb {
        return Err(NumericsError::Bracket { lo: lo.to_f64(), hi: hi.to_f64() });
    }
    let mut iterations = 0;
    let mut mid = ctx.zero();
    let mut width = ctx.float(&b - &a);
    while width > *tol {
        mid.assign(&a + &b);
        mid /= 2;
        if mid <= a || mid >= b {
            break;
        }
        iterations += 1;
        match eval(&mut f, &mid)? {
            Some(Ordering::Equal) => return Ok(Bisection { root: mid, iterations }),
            s if s == sa => a.assign(&mid),
            _ => b.assign(&mid),
        }
        width.assign(&b - &a);
    }
    mid.assign(&a + &b);
    mid /= 2;
    Ok(Bisection { root: mid, iterations })
}

fn sign_of(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// Brackets of sign changes between consecutive samples, visiting the
/// abscissae in the given order and stopping once `limit` brackets are found.
/// Zero or NaN samples are skipped, so a sample landing on a root still yields
/// a bracket from its nonzero neighbours.
pub fn scan_points<F, I>(mut f: F, xs: I, limit: Option<usize>) -> Vec<(f64, f64)>
where
    F: FnMut(f64) -> f64,
    I: IntoIterator<Item = f64>,
{
    let mut out = Vec::new();
    let mut last: Option<(f64, i8)> = None;
    for x in xs {
        let s = sign_of(f(x));
        if s == 0 {
            continue;
        }
        if let Some((px, ps)) = last {
            if ps != s {
                out.push(if px < x { (px, x) } else { (x, px) });
                if limit.is_some_and(|l| out.len() >= l) {
                    break;
                }
            }
        }
        last = Some((x, s));
    }
    out
}

/// Every sign change of `f` over `steps` equal intervals of `[lo, hi]`, in
/// increasing order.
pub fn sign_change_scan<F>(f: F, lo: f64, hi: f64, steps: usize) -> Vec<(f64, f64)>
where
    F: FnMut(f64) -> f64,
{
    let steps = steps.max(1);
    let xs = (0..=steps).map(move |k| if k == steps { hi } else { lo + (hi - lo) * k as f64 / steps as f64 });
    scan_points(f, xs, None)
}
