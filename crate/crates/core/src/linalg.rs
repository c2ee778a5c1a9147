//! Small dense complex linear algebra: matrix exponential via Pade
//! scaling-and-squaring, Gaussian solves, and polynomial-based
//! eigendecomposition for the few-by-few dynamical matrices.

use num_complex::Complex64 as C64;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let r = rows.len();
        let c = rows[0].len();
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c);
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let lhs = k * other.cols;
                let dst = i * other.cols;
                for j in 0..other.cols {
                    out.data[dst + j] += a * other.data[lhs + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let row = i * self.cols;
                v.iter().enumerate().map(|(j, x)| self.data[row + j] * x).sum()
            })
            .collect()
    }

    pub fn scale(&self, s: C64) -> CMat {
        let mut out = self.clone();
        for x in &mut out.data {
            *x *= s;
        }
        out
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x += *y;
        }
        out
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            *x -= *y;
        }
        out
    }

    pub fn dagger(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.cols {
            let mut s = 0.0;
            for i in 0..self.rows {
                s += self[(i, j)].norm();
            }
            best = best.max(s);
        }
        best
    }

    /// Solve self * X = B with partial-pivoting Gaussian elimination.
    pub fn solve(&self, b: &CMat) -> Result<CMat, LinalgError> {
        assert_eq!(self.rows, self.cols);
        assert_eq!(self.rows, b.rows);
        let n = self.rows;
        let m = b.cols;
        let mut a = self.data.clone();
        let mut x = b.data.clone();
        for col in 0..n {
            let mut pivot = col;
            let mut best = a[col * n + col].norm();
            for r in col + 1..n {
                let v = a[r * n + col].norm();
                if v > best {
                    best = v;
                    pivot = r;
                }
            }
            if best == 0.0 {
                return Err(LinalgError::Singular);
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(col * n + j, pivot * n + j);
                }
                for j in 0..m {
                    x.swap(col * m + j, pivot * m + j);
                }
            }
            let inv = C64::new(1.0, 0.0) / a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] * inv;
                if f == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in col..n {
                    let v = a[col * n + j];
                    a[r * n + j] -= f * v;
                }
                for j in 0..m {
                    let v = x[col * m + j];
                    x[r * m + j] -= f * v;
                }
            }
        }
        for col in (0..n).rev() {
            let inv = C64::new(1.0, 0.0) / a[col * n + col];
            for j in 0..m {
                let mut acc = x[col * m + j];
                for k in col + 1..n {
                    acc -= a[col * n + k] * x[k * m + j];
                }
                x[col * m + j] = acc * inv;
            }
        }
        Ok(CMat { rows: n, cols: m, data: x })
    }

    pub fn inverse(&self) -> Result<CMat, LinalgError> {
        self.solve(&CMat::identity(self.rows))
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

/// Matrix exponential by degree-13 Pade approximation with scaling and
/// squaring (Higham 2005).
pub fn expm(a: &CMat) -> CMat {
    assert_eq!(a.rows, a.cols);
    const THETA_13: f64 = 5.371_920_351_148_152;
    let norm = a.one_norm();
    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil().max(0.0) as u32
    } else {
        0
    };
    let a_scaled = a.scale(C64::new(0.5f64.powi(s as i32), 0.0));
    let mut result = expm_pade13(&a_scaled);
    for _ in 0..s {
        result = result.matmul(&result);
    }
    result
}

fn expm_pade13(a: &CMat) -> CMat {
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let n = a.rows;
    let id = CMat::identity(n);
    let a2 = a.matmul(a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let re = |x: f64| C64::new(x, 0.0);

    let u_inner = a6
        .scale(re(B[13]))
        .add(&a4.scale(re(B[11])))
        .add(&a2.scale(re(B[9])));
    let u_poly = a6
        .matmul(&u_inner)
        .add(&a6.scale(re(B[7])))
        .add(&a4.scale(re(B[5])))
        .add(&a2.scale(re(B[3])))
        .add(&id.scale(re(B[1])));
    let u = a.matmul(&u_poly);

    let v_inner = a6
        .scale(re(B[12]))
        .add(&a4.scale(re(B[10])))
        .add(&a2.scale(re(B[8])));
    let v = a6
        .matmul(&v_inner)
        .add(&a6.scale(re(B[6])))
        .add(&a4.scale(re(B[4])))
        .add(&a2.scale(re(B[2])))
        .add(&id.scale(re(B[0])));

    let num = v.add(&u);
    let den = v.sub(&u);
    den.solve(&num).expect("Pade denominator is nonsingular for scaled input")
}

/// Coefficients of the monic characteristic polynomial via the
/// Faddeev-LeVerrier recursion; index k holds the coefficient of x^k.
fn characteristic_polynomial(a: &CMat) -> Vec<C64> {
    let n = a.rows;
    let trace_of = |m: &CMat| -> C64 { (0..n).map(|i| m[(i, i)]).sum() };
    let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
    coeffs[n] = C64::new(1.0, 0.0);
    // M_1 = A; M_k = A (M_{k-1} + c_{n-k+1} I); c_{n-k} = -tr(M_k)/k.
    let mut m = a.clone();
    coeffs[n - 1] = -trace_of(&m);
    for k in 2..=n {
        let mut shifted = m;
        for i in 0..n {
            shifted[(i, i)] += coeffs[n - k + 1];
        }
        m = a.matmul(&shifted);
        coeffs[n - k] = -trace_of(&m) / C64::new(k as f64, 0.0);
    }
    coeffs
}

/// All roots of a monic polynomial by Durand-Kerner iteration.
fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>, LinalgError> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(vec![]);
    }
    let eval = |x: C64| {
        let mut acc = coeffs[degree];
        for k in (0..degree).rev() {
            acc = acc * x + coeffs[k];
        }
        acc
    };
    // Radius bound from the coefficients keeps the seeds around the roots.
    let radius = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
    let seed = C64::new(0.4, 0.9);
    let mut roots: Vec<C64> = (0..degree)
        .map(|k| seed.powu(k as u32 + 1) * radius / seed.norm().powi(k as i32 + 1))
        .collect();
    let mut converged = false;
    for _ in 0..500 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..degree {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            if denom.norm() == 0.0 {
                denom = C64::new(1e-300, 0.0);
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            max_step = max_step.max(step.norm());
        }
        if max_step < 1e-14 * radius {
            converged = true;
            break;
        }
    }
    if converged {
        Ok(roots)
    } else {
        // Durand-Kerner stalls at sqrt(eps) steps around multiple roots;
        // accept if the residuals themselves are tiny.
        let ok = roots.iter().all(|&r| eval(r).norm() < 1e-8 * radius.powi(degree as i32));
        if ok {
            Ok(roots)
        } else {
            Err(LinalgError::NoConvergence)
        }
    }
}

/// Eigenvalues of a small (n <= ~8) complex matrix.
pub fn eigenvalues(a: &CMat) -> Result<Vec<C64>, LinalgError> {
    polynomial_roots(&characteristic_polynomial(a))
}

/// Eigenvalues plus an eigenvector matrix (columns), obtained by inverse
/// iteration around each eigenvalue. Suitable for the small dynamical
/// matrices; near-defective matrices yield nearly parallel columns, which
/// is exactly what the condition-number diagnostics look for.
pub fn eigen_decomposition(a: &CMat) -> Result<(Vec<C64>, CMat), LinalgError> {
    let n = a.rows;
    let lambdas = eigenvalues(a)?;
    let norm = a.one_norm().max(1.0);
    let mut vectors = CMat::zeros(n, n);
    for (k, &lambda) in lambdas.iter().enumerate() {
        // Shift slightly off the eigenvalue so the solve stays finite.
        let shift = lambda + C64::new(1e-10 * norm, 1e-10 * norm);
        let mut shifted = a.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        // Deterministic pseudo-random start.
        let mut v: Vec<C64> = (0..n)
            .map(|i| C64::new(1.0 + 0.37 * (i as f64 + 1.0).sin(), 0.21 * (k as f64 - i as f64)))
            .collect();
        for _ in 0..4 {
            let rhs = CMat { rows: n, cols: 1, data: v.clone() };
            let sol = match shifted.solve(&rhs) {
                Ok(s) => s,
                Err(_) => break,
            };
            let nrm = sol.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if !nrm.is_finite() || nrm == 0.0 {
                break;
            }
            v = sol.data.iter().map(|&x| x / nrm).collect();
        }
        for i in 0..n {
            vectors[(i, k)] = v[i];
        }
    }
    Ok((lambdas, vectors))
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.
/// Robust for the moderate dimensions used in the state diagnostics.
pub fn hermitian_eigenvalues(a: &CMat) -> Vec<f64> {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let off_norm = |m: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let scale = a.one_norm().max(1e-300);
    for _sweep in 0..60 {
        if off_norm(&m) <= 1e-13 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.norm() <= 1e-300 {
                    continue;
                }
                let phase = apq / apq.norm();
                let tau = (m[(q, q)].re - m[(p, p)].re) / (2.0 * apq.norm());
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns p, q of the rotation: J[p,p]=c, J[q,q]=c,
                // J[p,q]=s*phase, J[q,p]=-s*conj(phase).
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * c - mkq * s * phase.conj();
                    m[(k, q)] = mkp * s * phase + mkq * c;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = mpk * c - mqk * s * phase;
                    m[(q, k)] = mpk * s * phase.conj() + mqk * c;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

/// One-norm condition number, infinite for singular matrices.
pub fn condition_number(a: &CMat) -> f64 {
    match a.inverse() {
        Ok(inv) => a.one_norm() * inv.one_norm(),
        Err(_) => f64::INFINITY,
    }
}
