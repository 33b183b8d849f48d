//! Small dense linear-algebra kernels.
//!
//! The systems solved here are tiny (tens of unknowns for the circuit
//! solver, ~1000 for the ELM readout), so plain dense routines with
//! partial pivoting are the right tool.

use num_complex::Complex64;

/// Row-major square complex matrix.
#[derive(Debug, Clone)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.n + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.n + c] = v;
    }

    #[inline]
    pub fn add(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.n + c] += v;
    }

    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.data[r * self.n..(r + 1) * self.n]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.n {
            self.data.swap(a * self.n + c, b * self.n + c);
        }
    }
}

/// Factors `a` in place as `P a = L U` with partial pivoting.
///
/// Returns the row permutation (`perm[k]` = source row swapped into row `k`
/// at step `k`), or `None` when a pivot vanishes.
pub fn lu_factor(a: &mut CMat) -> Option<Vec<usize>> {
    let n = a.n;
    let mut perm = Vec::with_capacity(n);
    for k in 0..n {
        let mut p = k;
        let mut best = a.get(k, k).norm_sqr();
        for r in k + 1..n {
            let m = a.get(r, k).norm_sqr();
            if m > best {
                best = m;
                p = r;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return None;
        }
        a.swap_rows(k, p);
        perm.push(p);
        let pivot = a.get(k, k);
        for r in k + 1..n {
            let factor = a.get(r, k) / pivot;
            a.set(r, k, factor);
            if factor == Complex64::ZERO {
                continue;
            }
            let (head, tail) = a.data.split_at_mut(r * n);
            let krow = &head[k * n..k * n + n];
            let rrow = &mut tail[..n];
            for c in k + 1..n {
                rrow[c] -= factor * krow[c];
            }
        }
    }
    Some(perm)
}

/// Solves against a factorization produced by [`lu_factor`].
pub fn lu_solve_factored(lu: &CMat, perm: &[usize], b: &mut [Complex64]) {
    let n = lu.n;
    debug_assert_eq!(b.len(), n);
    for (k, &p) in perm.iter().enumerate() {
        b.swap(k, p);
    }
    // Forward substitution with unit lower triangle.
    for r in 1..n {
        let row = lu.row(r);
        let mut acc = b[r];
        for c in 0..r {
            acc -= row[c] * b[c];
        }
        b[r] = acc;
    }
    // Back substitution.
    for r in (0..n).rev() {
        let row = lu.row(r);
        let mut acc = b[r];
        for c in r + 1..n {
            acc -= row[c] * b[c];
        }
        b[r] = acc / row[r];
    }
}

/// Solves `a x = b` in place. `a` is destroyed; on success `b` holds the
/// solution. Returns `false` when the system is singular.
pub fn lu_solve_in_place(a: &mut CMat, b: &mut [Complex64]) -> bool {
    match lu_factor(a) {
        Some(perm) => {
            lu_solve_factored(a, &perm, b);
            true
        }
        None => false,
    }
}

/// Dense inverse via a single LU factorization. Returns `None` when singular.
pub fn invert(a: &CMat) -> Option<CMat> {
    let n = a.n;
    let mut lu = a.clone();
    let perm = lu_factor(&mut lu)?;
    let mut out = CMat::zeros(n);
    let mut col = vec![Complex64::ZERO; n];
    for c in 0..n {
        col.fill(Complex64::ZERO);
        col[c] = Complex64::ONE;
        lu_solve_factored(&lu, &perm, &mut col);
        for r in 0..n {
            out.set(r, c, col[r]);
        }
    }
    Some(out)
}

/// Solves the SPD system `g x = rhs` (row-major rhs of width `m`) by
/// Cholesky factorization. `g` and `rhs` are destroyed. Returns `false`
/// when `g` is not positive definite.
pub fn cholesky_solve(g: &mut [f64], n: usize, rhs: &mut [f64], m: usize) -> bool {
    debug_assert_eq!(g.len(), n * n);
    debug_assert_eq!(rhs.len(), n * m);
    // In-place lower-triangular factor, row-major.
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g[i * n + j];
            for k in 0..j {
                sum -= g[i * n + k] * g[j * n + k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return false;
                }
                g[i * n + j] = sum.sqrt();
            } else {
                g[i * n + j] = sum / g[j * n + j];
            }
        }
    }
    // Forward then backward substitution per rhs column.
    for col in 0..m {
        for i in 0..n {
            let mut sum = rhs[i * m + col];
            for k in 0..i {
                sum -= g[i * n + k] * rhs[k * m + col];
            }
            rhs[i * m + col] = sum / g[i * n + i];
        }
        for i in (0..n).rev() {
            let mut sum = rhs[i * m + col];
            for k in i + 1..n {
                sum -= g[k * n + i] * rhs[k * m + col];
            }
            rhs[i * m + col] = sum / g[i * n + i];
        }
    }
    true
}
