//! Finite-difference discretization of `−(pφ′)′ + qφ = Λφ` and a
//! bisection eigensolver for symmetric tridiagonal matrices.

use super::{Boundary, RadialProblem, SpectralError};

/// Symmetric tridiagonal matrix: diagonal `d`, off-diagonal `e`.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut u = 1.0;
        for i in 0..self.d.len() {
            let off = if i == 0 { 0.0 } else { self.e[i - 1] * self.e[i - 1] };
            u = self.d[i] - x - if i == 0 { 0.0 } else { off / u };
            if u == 0.0 {
                u = -f64::EPSILON * (self.d[i].abs() + x.abs()).max(1.0);
            }
            if u < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.d.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let rad = if i > 0 { self.e[i - 1].abs() } else { 0.0 } + if i + 1 < n { self.e[i].abs() } else { 0.0 };
            lo = lo.min(self.d[i] - rad);
            hi = hi.max(self.d[i] + rad);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue, zero-based.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-14 * mid.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an eigenvalue `lambda`, by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.d.len();
        let shift = lambda + 1e-10 * lambda.abs().max(1.0);
        let mut x = vec![1.0; n];
        for _ in 0..4 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Solves `(T − s)y = b` by the Thomas algorithm.
    fn solve_shifted(&self, s: f64, b: &[f64]) -> Vec<f64> {
        let n = self.d.len();
        let mut c = vec![0.0; n];
        let mut y = vec![0.0; n];
        let mut den = self.d[0] - s;
        y[0] = b[0] / den;
        for i in 1..n {
            c[i - 1] = self.e[i - 1] / den;
            den = self.d[i] - s - self.e[i - 1] * c[i - 1];
            if den == 0.0 {
                den = 1e-300;
            }
            y[i] = (b[i] - self.e[i - 1] * y[i - 1]) / den;
        }
        for i in (0..n - 1).rev() {
            y[i] -= c[i] * y[i + 1];
        }
        y
    }
}

/// Uniform grid of the problem.
pub(crate) fn grid(p: &RadialProblem) -> Vec<f64> {
    let n = p.grid_points;
    let h = (p.r_max - p.r_min) / (n - 1) as f64;
    (0..n).map(|i| p.r_min + h * i as f64).collect()
}

/// Log-derivative `φ′/φ` at `a < 1` of the solution regular at the origin,
/// from its series `r^{l+1}Σ bₖr^{2k}`.
pub(crate) fn regular_log_derivative(l: u32, lambda: f64, a: f64) -> f64 {
    let l = l as f64;
    let ll = l * (l + 1.0);
    let am = |m: f64| m * (m - 1.0) - ll;
    let pm = |m: f64| (m + 2.0) * (m + 1.0) - ll;
    let qm = |m: f64| 2.0 * am(m) + 4.0 * m + lambda;
    let mut b = vec![1.0];
    let (mut f, mut d) = (a.powf(l + 1.0), (l + 1.0) * a.powf(l));
    for k in 1..200 {
        let m = l + 1.0 + 2.0 * k as f64;
        let prev2 = if k >= 2 { b[k - 2] } else { 0.0 };
        let bk = -(qm(m - 2.0) * b[k - 1] + pm(m - 4.0) * prev2) / am(m);
        b.push(bk);
        let tf = bk * a.powf(m);
        f += tf;
        d += bk * m * a.powf(m - 1.0);
        if tf.abs() < 1e-18 * f.abs() {
            break;
        }
    }
    d / f
}

/// Log-derivative at `R > 1` of the solution decaying like `r^{−l−2}`,
/// from its series `Σ cₖr^{−l−2−2k}`.
pub(crate) fn decaying_log_derivative(l: u32, lambda: f64, r: f64) -> f64 {
    let l = l as f64;
    let ll = l * (l + 1.0);
    let am = |m: f64| m * (m - 1.0) - ll;
    let pm = |m: f64| (m + 2.0) * (m + 1.0) - ll;
    let qm = |m: f64| 2.0 * am(m) + 4.0 * m + lambda;
    let s = -l - 2.0;
    let mut c = vec![1.0];
    let (mut f, mut d) = (r.powf(s), s * r.powf(s - 1.0));
    for k in 1..400 {
        let m = s - 2.0 * k as f64;
        let prev2 = if k >= 2 { c[k - 2] } else { 0.0 };
        let ck = -(qm(m + 2.0) * c[k - 1] + am(m + 4.0) * prev2) / pm(m);
        c.push(ck);
        let tf = ck * r.powf(m);
        f += tf;
        d += ck * m * r.powf(m - 1.0);
        if tf.abs() < 1e-18 * f.abs() {
            break;
        }
    }
    d / f
}

/// Matrix of the discretized problem with the end conditions fixed by
/// `lambda` (matched ends) or Dirichlet ends. The symmetric form absorbs
/// the half-cell mass at matched ends.
pub(crate) fn assemble(p: &RadialProblem, lambda: f64) -> Tridiagonal {
    let r = grid(p);
    let n = r.len();
    let h = r[1] - r[0];
    let pf = |x: f64| p.system.p(x);
    let qf = |x: f64| p.system.q(p.l, x);
    let mut d: Vec<f64> = r
        .iter()
        .map(|&x| (pf(x + h / 2.0) + pf(x - h / 2.0)) / (h * h) + qf(x))
        .collect();
    let mut e: Vec<f64> = r[..n - 1].iter().map(|&x| -pf(x + h / 2.0) / (h * h)).collect();
    match p.boundary {
        Boundary::Dirichlet => {
            d = d[1..n - 1].to_vec();
            e = e[1..n - 2].to_vec();
        }
        Boundary::Matched => {
            let (a, b) = (p.r_min, p.r_max);
            let sl = regular_log_derivative(p.l, lambda, a);
            let sr = decaying_log_derivative(p.l, lambda, b);
            // half cells of mass ½ at both ends, scaled by √2
            d[0] = 2.0 * ((pf(a + h / 2.0) / h + pf(a) * sl) / h + qf(a) / 2.0);
            d[n - 1] = 2.0 * ((pf(b - h / 2.0) / h - pf(b) * sr) / h + qf(b) / 2.0);
            let s = std::f64::consts::SQRT_2;
            e[0] *= s;
            e[n - 2] *= s;
        }
    }
    Tridiagonal { d, e }
}

/// `k`-th eigenvalue, iterating the matched end conditions to a fixed point.
pub(crate) fn eigenvalue(p: &RadialProblem, k: usize) -> Result<f64, SpectralError> {
    if p.boundary == Boundary::Dirichlet {
        return Ok(assemble(p, 0.0).eigenvalue(k));
    }
    // start from the leading-order Robin conditions
    let mut lambda = 4.0 * ((p.l as usize + 1 + k) as f64).powi(2) + 1.0;
    for _ in 0..200 {
        let next = assemble(p, lambda).eigenvalue(k);
        if (next - lambda).abs() <= 1e-13 * next.abs().max(1.0) {
            return Ok(next);
        }
        lambda = next;
    }
    Err(SpectralError::Convergence(format!(
        "end conditions for eigenvalue {k} did not settle"
    )))
}

/// Eigenvector on the grid nodes of the `k`-th eigenvalue. Dirichlet ends
/// are padded with zeros; matched ends are rescaled from the symmetric form.
pub(crate) fn eigenvector(p: &RadialProblem, k: usize) -> Result<(f64, Vec<f64>), SpectralError> {
    let lambda = eigenvalue(p, k)?;
    let t = assemble(p, lambda);
    let mut v = t.eigenvector(lambda);
    match p.boundary {
        Boundary::Dirichlet => {
            v.insert(0, 0.0);
            v.push(0.0);
        }
        Boundary::Matched => {
            let n = v.len();
            v[0] *= std::f64::consts::SQRT_2;
            v[n - 1] *= std::f64::consts::SQRT_2;
        }
    }
    Ok((lambda, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_on_a_known_matrix() {
        // tridiag(−1, 2, −1) of size n: 2 − 2cos(kπ/(n+1))
        let n = 50;
        let t = Tridiagonal {
            d: vec![2.0; n],
            e: vec![-1.0; n - 1],
        };
        for k in 0..5 {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-12);
        }
        assert_eq!(t.count_below(1e-9), 0);
        assert_eq!(t.count_below(4.0), n);
        let v = t.eigenvector(t.eigenvalue(0));
        // sin(iπ/(n+1)) up to sign
        let s: Vec<f64> = (1..=n).map(|i| (i as f64 * std::f64::consts::PI / (n + 1) as f64).sin()).collect();
        let norm = s.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = v.iter().zip(&s).map(|(a, b)| a * b).sum::<f64>() / norm;
        assert!((dot.abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn log_derivatives_of_exact_solutions() {
        // n = 1, l = 0: φ = r(1 + r²)^{−3/2}, Λ = 5
        let phi_ld = |r: f64| 1.0 / r - 3.0 * r / (1.0 + r * r);
        assert!((regular_log_derivative(0, 5.0, 0.01) - phi_ld(0.01)).abs() < 1e-10);
        assert!((decaying_log_derivative(0, 5.0, 30.0) - phi_ld(30.0)).abs() < 1e-14);
        assert!((decaying_log_derivative(0, 5.0, 3.0) - phi_ld(3.0)).abs() < 1e-12);
    }
}
