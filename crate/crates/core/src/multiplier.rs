//! The multiplier polynomial `T_{p/q}(b)`: the `z^{q+1}` coefficient of the
//! `q`-th iterate of `f(z) = λz + bz² + z³` at `λ = e^{2πip/q}`.

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest `q` accepted by [`tpoly`].
pub const MAX_TPOLY_PERIOD: u64 = 16;

/// Polynomial in `b`, coefficients in ascending powers.
pub type BPoly = Vec<Complex64>;

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> BPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add_into(acc: &mut BPoly, p: &[Complex64]) {
    if acc.len() < p.len() {
        acc.resize(p.len(), Complex64::new(0.0, 0.0));
    }
    for (a, x) in acc.iter_mut().zip(p) {
        *a += x;
    }
}

pub fn poly_eval(p: &[Complex64], b: Complex64) -> Complex64 {
    p.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * b + c)
}

/// Power series `Σ coeffs[n] zⁿ` truncated after `z^order`, with `b`-polynomial
/// coefficients. `coeffs[0]` is always empty (the series fixes 0).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    pub order: usize,
    pub coeffs: Vec<BPoly>,
}

impl TruncatedSeries {
    pub fn identity(order: usize) -> Self {
        let mut coeffs = vec![Vec::new(); order + 1];
        if order >= 1 {
            coeffs[1] = vec![Complex64::new(1.0, 0.0)];
        }
        TruncatedSeries { order, coeffs }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![Vec::new(); self.order + 1];
        for i in 1..=self.order {
            if self.coeffs[i].is_empty() {
                continue;
            }
            for j in 1..=self.order - i {
                if other.coeffs[j].is_empty() {
                    continue;
                }
                let prod = poly_mul(&self.coeffs[i], &other.coeffs[j]);
                poly_add_into(&mut coeffs[i + j], &prod);
            }
        }
        TruncatedSeries {
            order: self.order,
            coeffs,
        }
    }

    /// `f ∘ self`, with `f(w) = λw + bw² + w³`.
    pub fn compose_f(&self, lambda: Complex64) -> Self {
        let s2 = self.mul(self);
        let s3 = s2.mul(self);
        let mut coeffs = vec![Vec::new(); self.order + 1];
        #[allow(clippy::needless_range_loop)]
        for n in 1..=self.order {
            let mut c: BPoly = self.coeffs[n].iter().map(|x| x * lambda).collect();
            if !s2.coeffs[n].is_empty() {
                // Multiplying by b shifts the polynomial up one degree.
                let mut shifted = vec![Complex64::new(0.0, 0.0)];
                shifted.extend_from_slice(&s2.coeffs[n]);
                poly_add_into(&mut c, &shifted);
            }
            poly_add_into(&mut c, &s3.coeffs[n]);
            coeffs[n] = c;
        }
        TruncatedSeries {
            order: self.order,
            coeffs,
        }
    }

    /// Literal `b`-degree of each coefficient (length − 1), `None` when empty.
    pub fn degrees(&self) -> Vec<Option<usize>> {
        self.coeffs
            .iter()
            .map(|c| c.len().checked_sub(1))
            .collect()
    }
}

/// Free-function form of [`TruncatedSeries::compose_f`].
pub fn compose_series(s: &TruncatedSeries, lambda: Complex64) -> TruncatedSeries {
    s.compose_f(lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultiplierPoly {
    pub p: u64,
    pub q: u64,
    /// Ascending powers of `b`.
    pub coefficients: Vec<Complex64>,
}

impl MultiplierPoly {
    pub fn eval(&self, b: Complex64) -> Complex64 {
        poly_eval(&self.coefficients, b)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn norm(&self) -> f64 {
        self.coefficients
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub fn rotation_multiplier(p: u64, q: u64) -> Complex64 {
    Complex64::from_polar(1.0, std::f64::consts::TAU * p as f64 / q as f64)
}

fn check_rotation(p: u64, q: u64) -> Result<()> {
    if q == 0 || p >= q || p.gcd(&q) != 1 {
        return Err(Error::InvalidArgument(format!("rotation {p}/{q}")));
    }
    if q > MAX_TPOLY_PERIOD {
        return Err(Error::BoundExceeded {
            what: "q",
            value: q as usize,
            limit: MAX_TPOLY_PERIOD as usize,
        });
    }
    Ok(())
}

/// All `q+1` intermediate series of the iteration, starting with the identity.
pub fn iterate_series(p: u64, q: u64) -> Result<Vec<TruncatedSeries>> {
    check_rotation(p, q)?;
    let lambda = rotation_multiplier(p, q);
    let mut out = vec![TruncatedSeries::identity(q as usize + 1)];
    for _ in 0..q {
        let next = out.last().expect("non-empty").compose_f(lambda);
        out.push(next);
    }
    Ok(out)
}

pub fn tpoly(p: u64, q: u64) -> Result<MultiplierPoly> {
    let steps = iterate_series(p, q)?;
    let last = steps.last().expect("q ≥ 1");
    let mut coefficients = last.coeffs[q as usize + 1].clone();
    coefficients.resize(q as usize + 1, Complex64::new(0.0, 0.0));
    Ok(MultiplierPoly { p, q, coefficients })
}

/// Roots of `tp` with multiplicity: Aberth–Ehrlich iteration followed by
/// Newton polishing.
pub fn tpoly_roots(tp: &MultiplierPoly) -> Result<Vec<Complex64>> {
    poly_roots(&tp.coefficients)
}

/// Roots of a polynomial given in ascending coefficients. Trailing
/// coefficients below `1e-14` of the norm are dropped.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let norm = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().expect("non-empty").norm() <= 1e-14 * norm {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|x| x / lead).collect();
    let dmonic: Vec<Complex64> = (1..=deg).map(|k| monic[k] * k as f64).collect();

    // Initial guesses on a circle of the Cauchy-bound radius, off the axes.
    let radius = 1.0 + monic[..deg].iter().map(|x| x.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            let t = std::f64::consts::TAU * (k as f64 + 0.25) / deg as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, t)
        })
        .collect();
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..deg {
            let pv = poly_eval(&monic, z[i]);
            let dv = poly_eval(&dmonic, z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dv;
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if w.is_finite() {
                z[i] -= w;
                max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }
    let tol = 1e-12 * norm / lead.norm();
    let mut worst: f64 = 0.0;
    for r in z.iter_mut() {
        for _ in 0..8 {
            let dv = poly_eval(&dmonic, *r);
            if dv.norm() == 0.0 {
                break;
            }
            let step = poly_eval(&monic, *r) / dv;
            if !step.is_finite() {
                break;
            }
            *r -= step;
            if step.norm() < 1e-17 * (1.0 + r.norm()) {
                break;
            }
        }
        worst = worst.max(poly_eval(&monic, *r).norm());
    }
    if worst > tol.max(1e-14) && worst > 1e-9 {
        return Err(Error::IllConditioned { residual: worst });
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn one_step_is_f() {
        let lambda = c(0.3, 0.2);
        let s = TruncatedSeries::identity(3).compose_f(lambda);
        assert_eq!(s.coeffs[1], vec![lambda]);
        assert_eq!(s.coeffs[2], vec![c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(s.coeffs[3], vec![c(1.0, 0.0)]);
    }

    #[test]
    fn small_cases() {
        let t = tpoly(0, 1).unwrap();
        assert!(close(t.coefficients[0], c(0.0, 0.0), 1e-15));
        assert!(close(t.coefficients[1], c(1.0, 0.0), 1e-15));
        let t = tpoly(1, 2).unwrap();
        assert!(close(t.coefficients[0], c(-2.0, 0.0), 1e-12));
        assert!(close(t.coefficients[1], c(0.0, 0.0), 1e-12));
        assert!(close(t.coefficients[2], c(-2.0, 0.0), 1e-12));
    }

    #[test]
    fn roots_half() {
        let r = tpoly_roots(&tpoly(1, 2).unwrap()).unwrap();
        assert_eq!(r.len(), 2);
        assert!(close(r[0], c(0.0, -1.0), 1e-12) || close(r[0], c(0.0, 1.0), 1e-12));
        assert!(close(r[0], -r[1], 1e-12));
        let r = tpoly_roots(&tpoly(0, 1).unwrap()).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].norm() < 1e-15);
    }

    #[test]
    fn degrees_match_q() {
        for (p, q) in [(1, 3), (1, 4), (1, 5), (1, 6)] {
            let t = tpoly(p, q).unwrap();
            assert_eq!(t.degree(), q as usize);
            assert!(t.coefficients[q as usize].norm() > 1e-8);
        }
    }

    #[test]
    fn generic_roots() {
        // (b − 1)(b + 2)(b − i) = b³ + (1 − i)b² + (−2 − i)b + 2i
        let p = vec![c(0.0, 2.0), c(-2.0, -1.0), c(1.0, -1.0), c(1.0, 0.0)];
        let r = poly_roots(&p).unwrap();
        for want in [c(1.0, 0.0), c(-2.0, 0.0), c(0.0, 1.0)] {
            assert!(r.iter().any(|z| close(*z, want, 1e-12)));
        }
    }

    #[test]
    fn rejects_bad_rotation() {
        assert!(tpoly(2, 4).is_err());
        assert!(matches!(tpoly(1, 17), Err(Error::BoundExceeded { .. })));
    }
}
