//! Fixed-order reductions. Results depend only on the input order, never on
//! scheduling, so they are bit-stable across thread counts.

use num_complex::Complex64;

const BLOCK: usize = 32;

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= BLOCK {
        xs.iter().sum()
    } else {
        let mid = xs.len() / 2;
        pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
    }
}

/// `sum conj(a_i) * b_i`, pairwise.
pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= BLOCK {
        a.iter()
            .zip(b)
            .fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
    } else {
        let mid = a.len() / 2;
        cdot(&a[..mid], &b[..mid]) + cdot(&a[mid..], &b[mid..])
    }
}

pub fn cnorm(a: &[Complex64]) -> f64 {
    // scale first so tiny and huge entries neither underflow nor overflow
    let m = a.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    let sq: Vec<f64> = a.iter().map(|x| (x / m).norm_sqr()).collect();
    m * pairwise_sum(&sq).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_exact_integer_sums() {
        let xs: Vec<f64> = (1..=1000).map(f64::from).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn norm_survives_extreme_scales() {
        let a = vec![Complex64::new(3e-200, 0.0), Complex64::new(0.0, 4e-200)];
        assert!((cnorm(&a) / 5e-200 - 1.0).abs() < 1e-15);
        let b = vec![Complex64::new(3e200, 4e200)];
        assert!((cnorm(&b) / 5e200 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dot_is_conjugate_linear_in_first_argument() {
        let a: Vec<_> = (0..100).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let i = Complex64::new(0.0, 1.0);
        let ia: Vec<_> = a.iter().map(|x| x * i).collect();
        let d1 = cdot(&ia, &a);
        let d2 = cdot(&a, &a) * i.conj();
        assert!((d1 - d2).norm() < 1e-9);
    }
}
