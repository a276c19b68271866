//! Gauss-Jacobi rules on [-1, 1] for the weight `(1 - x)^a (1 + x)^b`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::special::log_gamma;

/// Nodes and weights of an n-point Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Gauss-Legendre rule (a = b = 0).
    pub fn legendre(n: usize) -> Result<Self> {
        Self::jacobi(n, 0.0, 0.0)
    }

    /// n-point Gauss-Jacobi rule, exact for `(1-x)^a (1+x)^b p(x)` with
    /// `deg p <= 2n - 1`. Requires `a, b > -1`.
    ///
    /// Nodes are the eigenvalues of the Jacobi matrix of the monic
    /// three-term recurrence; weights come from the first eigenvector
    /// components (Golub-Welsch).
    pub fn jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("n", 0.0, "at least one node"));
        }
        if !(a > -1.0) || !a.is_finite() {
            return Err(Error::domain("a", a, "a > -1"));
        }
        if !(b > -1.0) || !b.is_finite() {
            return Err(Error::domain("b", b, "b > -1"));
        }
        let ab = a + b;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        diag[0] = (b - a) / (ab + 2.0);
        for (i, d) in diag.iter_mut().enumerate().skip(1) {
            let k = i as f64;
            let s = 2.0 * k + ab;
            *d = (b * b - a * a) / (s * (s + 2.0));
        }
        // off[i] couples rows i-1 and i.
        for (i, o) in off.iter_mut().enumerate().skip(1) {
            let k = i as f64;
            let s = 2.0 * k + ab;
            let beta = if i == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab))
            } else {
                4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            *o = libm::sqrt(beta);
        }
        let mu0 = libm::exp(
            (ab + 1.0) * core::f64::consts::LN_2 + log_gamma(a + 1.0)? + log_gamma(b + 1.0)?
                - log_gamma(ab + 2.0)?,
        );
        let first = symmetric_tridiagonal_eigen(&mut diag, &mut off);
        let mut pairs: Vec<(f64, f64)> = diag
            .iter()
            .zip(first.iter())
            .map(|(&x, &v)| (x, mu0 * v * v))
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// On return `diag` holds the eigenvalues; the result holds the first
/// component of each normalized eigenvector. `off[i]` is the entry
/// coupling rows `i - 1` and `i` (`off[0]` is ignored).
fn symmetric_tridiagonal_eigen(diag: &mut [f64], off: &mut [f64]) -> Vec<f64> {
    let n = diag.len();
    // First row of the accumulated rotation matrix.
    let mut z = vec![0.0; n];
    z[0] = 1.0;
    for i in 1..n {
        off[i - 1] = off[i];
    }
    off[n - 1] = 0.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = libm::fabs(diag[m]) + libm::fabs(diag[m + 1]);
                if libm::fabs(off[m]) <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                break;
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = libm::hypot(g, 1.0);
            g = diag[m] - diag[l] + off[l] / (g + if g >= 0.0 { r } else { -r });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = libm::hypot(f, g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::beta;

    /// ∫_{-1}^{1} (1-x)^a (1+x)^{b+p} dx = 2^{a+b+p+1} B(a+1, b+p+1).
    fn shifted_moment(a: f64, b: f64, p: i32) -> f64 {
        libm::pow(2.0, a + b + f64::from(p) + 1.0) * beta(a + 1.0, b + f64::from(p) + 1.0).unwrap()
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        for &(a, b) in &[
            (0.0, 0.0),
            (-0.5, 0.0),
            (0.0, -0.25),
            (-0.7, 0.0),
            (0.0, 1.75),
            (0.3, -0.6),
        ] {
            let rule = GaussRule::jacobi(8, a, b).unwrap();
            for p in 0..16 {
                let got: f64 = rule
                    .nodes
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &w)| w * libm::pow(1.0 + x, f64::from(p)))
                    .sum();
                let want = shifted_moment(a, b, p);
                assert!(
                    ((got - want) / want).abs() < 2e-14,
                    "a={a} b={b} p={p}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn legendre_nodes_are_symmetric_and_sorted() {
        let rule = GaussRule::legendre(8).unwrap();
        for i in 0..8 {
            assert!((rule.nodes[i] + rule.nodes[7 - i]).abs() < 1e-15);
            assert!((rule.weights[i] - rule.weights[7 - i]).abs() < 1e-15);
        }
        assert!(rule.nodes.windows(2).all(|w| w[0] < w[1]));
        // Largest 8-point Legendre node.
        assert!((rule.nodes[7] - 0.960_289_856_497_536_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_exponents() {
        assert!(GaussRule::jacobi(8, -1.0, 0.0).is_err());
        assert!(GaussRule::jacobi(8, 0.0, f64::NAN).is_err());
        assert!(GaussRule::jacobi(0, 0.0, 0.0).is_err());
    }
}
