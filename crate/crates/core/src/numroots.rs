//! Simultaneous approximation of all complex roots of a polynomial with
//! dyadic Gaussian coefficients (Aberth–Ehrlich iteration).
//!
//! Results are best-effort approximations; certification happens in
//! [`crate::isolate`].

use num_complex::Complex64;

use crate::arith::{Dyadic, GaussianDyadic, Round};

/// Lowest working precision accepted anywhere in the pipeline.
pub const MIN_PRECISION: u64 = 8;

/// Approximations `s_1..s_N` of the roots of `sum coeffs[i] z^i` computed with
/// `p`-bit arithmetic. The leading coefficient must be nonzero.
pub fn approximate_roots(coeffs: &[GaussianDyadic], p: u64) -> Vec<GaussianDyadic> {
    approximate_roots_from(coeffs, p, None)
}

/// Like [`approximate_roots`], optionally warm-started from earlier
/// approximations of (nearly) the same polynomial.
pub fn approximate_roots_from(coeffs: &[GaussianDyadic], p: u64, hints: Option<&[GaussianDyadic]>) -> Vec<GaussianDyadic> {
    let n = coeffs.len().saturating_sub(1);
    assert!(n == 0 || !coeffs[n].is_zero(), "leading coefficient must be nonzero");
    let p = p.max(MIN_PRECISION);
    if n == 0 {
        return Vec::new();
    }
    let prec = p + 16;
    if n == 1 {
        return vec![cdiv(&(-&coeffs[0]), &coeffs[1], prec)];
    }
    let scale = root_scale(coeffs);
    let mut roots = match hints {
        Some(h) if h.len() == n => h.to_vec(),
        _ => aberth_f64(coeffs, scale),
    };
    if p > 50 || hints.is_some() {
        if hints.is_none() {
            unsettle(&mut roots, scale);
        }
        aberth_big(coeffs, &mut roots, prec, scale);
    }
    roots
}

/// Rough `log2` of a root bound (Fujiwara), used to scale iterations.
fn root_scale(coeffs: &[GaussianDyadic]) -> i64 {
    let n = coeffs.len() - 1;
    let ln = coeffs[n].ilog2().unwrap();
    let mut s = i64::MIN;
    for i in 1..=n {
        if let Some(l) = coeffs[n - i].ilog2() {
            let v = (l - ln + 1).div_euclid(i as i64) + 1;
            s = s.max(v);
        }
    }
    if s == i64::MIN {
        0
    } else {
        s + 1
    }
}

/// Move each approximation by a tiny offset in a generic direction. Iterates
/// that start on a symmetry line of the polynomial (say, all on a vertical
/// line through a real double-root cluster) can otherwise stay on it forever.
fn unsettle(z: &mut [GaussianDyadic], scale: i64) {
    for (j, x) in z.iter_mut().enumerate() {
        let t = 0.7 + 2.399963 * j as f64;
        let off = GaussianDyadic::from_complex64(Complex64::from_polar(1.0, t)).mul_pow2(scale - 40);
        *x = &*x + &off;
    }
}

fn aberth_f64(coeffs: &[GaussianDyadic], scale: i64) -> Vec<GaussianDyadic> {
    let n = coeffs.len() - 1;
    // y = z / 2^scale, normalized so the largest coefficient is about 1
    let logs: Vec<Option<i64>> = coeffs.iter().enumerate().map(|(i, c)| c.ilog2().map(|l| l + scale * i as i64)).collect();
    let top = logs.iter().flatten().copied().max().unwrap();
    let c: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let k = scale * i as i64 - top;
            Complex64::new(b.re.mul_pow2(k).to_f64(), b.im.mul_pow2(k).to_f64())
        })
        .collect();
    let lead = c[n].norm().max(f64::MIN_POSITIVE);
    let tail = c.iter().find(|x| x.norm() > 0.0).map_or(1.0, |x| x.norm());
    let r0 = (tail / lead).powf(1.0 / n as f64).clamp(1e-3, 2.0);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| {
            let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64 + 0.7;
            Complex64::from_polar(r0 * (1.0 + 0.01 * j as f64 / n as f64), t)
        })
        .collect();
    let cap = 64 * n + 64;
    for _ in 0..cap {
        let mut done = true;
        for j in 0..n {
            let (v, dv) = horner2_f64(&c, z[j]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = if dv.norm() == 0.0 { v } else { v / dv };
            let mut sum = Complex64::new(0.0, 0.0);
            for i in 0..n {
                if i != j {
                    let d = z[j] - z[i];
                    if d.norm() > 0.0 {
                        sum += d.inv();
                    }
                }
            }
            let den = Complex64::new(1.0, 0.0) - ratio * sum;
            let w = if den.norm() == 0.0 { ratio } else { ratio / den };
            if !w.re.is_finite() || !w.im.is_finite() {
                continue;
            }
            z[j] -= w;
            if w.norm() > 1e-15 * z[j].norm().max(1e-300) {
                done = false;
            }
        }
        if done {
            break;
        }
    }
    z.into_iter()
        .map(|x| {
            let x = if x.re.is_finite() && x.im.is_finite() { x } else { Complex64::new(0.0, 0.0) };
            GaussianDyadic::from_complex64(x).mul_pow2(scale)
        })
        .collect()
}

fn horner2_f64(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for a in c.iter().rev() {
        dv = dv * z + v;
        v = v * z + a;
    }
    (v, dv)
}

fn rnd(z: GaussianDyadic, prec: u64) -> GaussianDyadic {
    z.round(prec, Round::Nearest)
}

fn cmul(a: &GaussianDyadic, b: &GaussianDyadic, prec: u64) -> GaussianDyadic {
    rnd(a * b, prec)
}

fn cdiv(a: &GaussianDyadic, b: &GaussianDyadic, prec: u64) -> GaussianDyadic {
    if b.im.is_zero() {
        return GaussianDyadic::new(
            Dyadic::div(&a.re, &b.re, prec, Round::Nearest),
            Dyadic::div(&a.im, &b.re, prec, Round::Nearest),
        );
    }
    let den = b.norm_sq().round(prec + 4, Round::Nearest);
    let num = cmul(a, &b.conj(), prec + 4);
    GaussianDyadic::new(Dyadic::div(&num.re, &den, prec, Round::Nearest), Dyadic::div(&num.im, &den, prec, Round::Nearest))
}

fn aberth_big(coeffs: &[GaussianDyadic], z: &mut [GaussianDyadic], prec: u64, scale: i64) {
    let n = coeffs.len() - 1;
    let c: Vec<GaussianDyadic> = coeffs.iter().map(|x| rnd(x.clone(), prec)).collect();
    let one = GaussianDyadic::one();
    // stop once every correction is below 2^-prec relative to the root scale
    let tol = scale - prec as i64;
    let cap = 64 * n;
    for _ in 0..cap {
        let mut done = true;
        for j in 0..n {
            let mut v = GaussianDyadic::zero();
            let mut dv = GaussianDyadic::zero();
            for a in c.iter().rev() {
                dv = rnd(&cmul(&dv, &z[j], prec) + &v, prec);
                v = rnd(&cmul(&v, &z[j], prec) + a, prec);
            }
            if v.is_zero() {
                continue;
            }
            let ratio = if dv.is_zero() { v } else { cdiv(&v, &dv, prec) };
            let mut sum = GaussianDyadic::zero();
            for i in 0..n {
                if i != j {
                    let d = &z[j] - &z[i];
                    if !d.is_zero() {
                        sum = rnd(&sum + &cdiv(&one, &d, prec), prec);
                    }
                }
            }
            let den = &one - &cmul(&ratio, &sum, prec);
            let w = if den.is_zero() { ratio } else { cdiv(&ratio, &den, prec) };
            z[j] = rnd(&z[j] - &w, prec);
            if w.ilog2().is_some_and(|l| l >= tol) {
                done = false;
            }
        }
        if done {
            break;
        }
    }
}
