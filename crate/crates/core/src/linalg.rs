//! Dense complex linear algebra at working precision: column-pivoted
//! Householder QR, nullspaces and square solves with residual checks.

use rug::{Complex, Float};

use crate::error::{Error, Result};
use crate::precision::{abs, Cplx, PrecisionContext, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cplx>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize, ctx: &PrecisionContext) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ctx.zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cplx) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMatrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Cplx {
        &self.data[i * self.cols + j]
    }

    pub fn get_mut(&mut self, i: usize, j: usize) -> &mut Cplx {
        &mut self.data[i * self.cols + j]
    }

    pub fn mul_vec(&self, x: &[Cplx]) -> Vec<Cplx> {
        let prec = x.first().map_or(53, |c| c.prec().0);
        (0..self.rows)
            .map(|i| {
                let mut acc = Complex::new(prec);
                for (j, xj) in x.iter().enumerate() {
                    acc += Complex::with_val(prec, self.get(i, j) * xj);
                }
                acc
            })
            .collect()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> Real {
        let prec = self.data.first().map_or(53, |c| c.prec().0);
        let mut s = Float::new(prec);
        for c in &self.data {
            s += Float::with_val(prec, c.norm_ref());
        }
        s.sqrt()
    }
}

pub fn vec_norm(x: &[Cplx]) -> Real {
    let prec = x.first().map_or(53, |c| c.prec().0);
    let mut s = Float::new(prec);
    for c in x {
        s += Float::with_val(prec, c.norm_ref());
    }
    s.sqrt()
}

/// `‖Ax‖ / (‖A‖ ‖x‖)`.
pub fn relative_residual(a: &CMatrix, x: &[Cplx]) -> f64 {
    let r = vec_norm(&a.mul_vec(x));
    let scale = a.norm() * vec_norm(x);
    if scale.is_zero() {
        return f64::INFINITY;
    }
    (r / scale).to_f64()
}

/// `A D P = Q R` with `D` a diagonal column equilibration and `P` a column
/// permutation.
#[derive(Debug, Clone)]
pub struct PivotedQr {
    r: CMatrix,
    reflectors: Vec<(Vec<Cplx>, Real)>,
    perm: Vec<usize>,
    col_scale: Vec<Real>,
    prec: u32,
}

impl PivotedQr {
    pub fn new(a: &CMatrix, ctx: &PrecisionContext) -> Self {
        let (m, n) = (a.rows, a.cols);
        let prec = ctx.bits();
        let col_scale: Vec<Real> = (0..n)
            .map(|j| {
                let mut s = Float::new(prec);
                for i in 0..m {
                    s += Float::with_val(prec, a.get(i, j).norm_ref());
                }
                let s = s.sqrt();
                if s.is_zero() {
                    ctx.real(1)
                } else {
                    s.recip()
                }
            })
            .collect();
        let mut r = CMatrix::from_fn(m, n, |i, j| Complex::with_val(prec, a.get(i, j) * &col_scale[j]));
        let mut perm: Vec<usize> = (0..n).collect();
        let mut reflectors = Vec::new();
        for k in 0..m.min(n) {
            let norms: Vec<Real> = (k..n)
                .map(|j| {
                    let mut s = Float::new(prec);
                    for i in k..m {
                        s += Float::with_val(prec, r.get(i, j).norm_ref());
                    }
                    s
                })
                .collect();
            let (best, best_norm) = norms
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.partial_cmp(y.1).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, v)| (i + k, v.clone()))
                .expect("nonempty column range");
            if best != k {
                for i in 0..m {
                    r.data.swap(i * n + k, i * n + best);
                }
                perm.swap(k, best);
            }
            if best_norm.is_zero() {
                break;
            }
            let alpha = best_norm.sqrt();
            let x0 = r.get(k, k).clone();
            let phase = if x0.is_zero() {
                ctx.one()
            } else {
                Complex::with_val(prec, &x0 / abs(&x0))
            };
            let mut v: Vec<Cplx> = (k..m).map(|i| r.get(i, k).clone()).collect();
            v[0] += Complex::with_val(prec, &phase * &alpha);
            let beta = {
                let mut s = Float::new(prec);
                for vi in &v {
                    s += Float::with_val(prec, vi.norm_ref());
                }
                s
            };
            for j in k + 1..n {
                let mut s = Complex::new(prec);
                for (t, vi) in v.iter().enumerate() {
                    s += Complex::with_val(prec, vi.conj_ref()) * r.get(k + t, j);
                }
                let f = Complex::with_val(prec, s * 2u32) / &beta;
                for (t, vi) in v.iter().enumerate() {
                    *r.get_mut(k + t, j) -= Complex::with_val(prec, &f * vi);
                }
            }
            *r.get_mut(k, k) = -(phase * &alpha);
            for i in k + 1..m {
                *r.get_mut(i, k) = Complex::new(prec);
            }
            reflectors.push((v, beta));
        }
        PivotedQr {
            r,
            reflectors,
            perm,
            col_scale,
            prec,
        }
    }

    /// Magnitudes of the diagonal of `R`, non-increasing up to rounding.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.r.rows.min(self.r.cols))
            .map(|k| abs(self.r.get(k, k)).to_f64())
            .collect()
    }

    /// Numerical rank: diagonal entries above `tol · |R_00|`.
    pub fn rank(&self, tol: &Real) -> usize {
        let d: Vec<Real> = (0..self.r.rows.min(self.r.cols)).map(|k| abs(self.r.get(k, k))).collect();
        if d.is_empty() || d[0].is_zero() {
            return 0;
        }
        let cut = Float::with_val(self.prec, tol * &d[0]);
        d.iter().take_while(|x| **x > cut).count()
    }

    /// Back substitution `R11 y = rhs` on the leading `r × r` block.
    fn back_substitute(&self, rank: usize, rhs: &[Cplx]) -> Vec<Cplx> {
        let mut y = vec![Complex::new(self.prec); rank];
        for i in (0..rank).rev() {
            let mut s = rhs[i].clone();
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                s -= Complex::with_val(self.prec, self.r.get(i, j) * yj);
            }
            y[i] = s / self.r.get(i, i);
        }
        y
    }

    fn unpermute(&self, xp: Vec<Cplx>) -> Vec<Cplx> {
        let mut x = vec![Complex::new(self.prec); xp.len()];
        for (i, v) in xp.into_iter().enumerate() {
            let col = self.perm[i];
            x[col] = v * &self.col_scale[col];
        }
        x
    }

    /// Basis of the nullspace for the given rank, least free column first.
    pub fn nullspace(&self, rank: usize) -> Vec<Vec<Cplx>> {
        let n = self.r.cols;
        (rank..n)
            .map(|f| {
                let rhs: Vec<Cplx> = (0..rank).map(|i| -self.r.get(i, f).clone()).collect();
                let mut xp = self.back_substitute(rank, &rhs);
                xp.resize(n, Complex::new(self.prec));
                xp[f] = Complex::with_val(self.prec, 1);
                self.unpermute(xp)
            })
            .collect()
    }

    /// Solution of the square full-rank system `A x = b`.
    pub fn solve(&self, b: &[Cplx]) -> Result<Vec<Cplx>> {
        let n = self.r.cols;
        if self.r.rows != n || b.len() != n {
            return Err(Error::domain("solve needs a square system"));
        }
        if self.reflectors.len() < n {
            return Err(Error::Degeneracy("matrix is singular".into()));
        }
        let mut y: Vec<Cplx> = b.iter().map(|c| Complex::with_val(self.prec, c)).collect();
        for (k, (v, beta)) in self.reflectors.iter().enumerate() {
            let mut s = Complex::new(self.prec);
            for (t, vi) in v.iter().enumerate() {
                s += Complex::with_val(self.prec, vi.conj_ref()) * &y[k + t];
            }
            let f = Complex::with_val(self.prec, s * 2u32) / beta;
            for (t, vi) in v.iter().enumerate() {
                y[k + t] -= Complex::with_val(self.prec, &f * vi);
            }
        }
        let xp = self.back_substitute(n, &y);
        Ok(self.unpermute(xp))
    }
}

/// Nullspace of a wide or square matrix, with the rank decided at
/// `2^{-rank_bits}` relative to the largest pivot.
#[derive(Debug, Clone)]
pub struct Nullspace {
    pub basis: Vec<Vec<Cplx>>,
    pub rank: usize,
    /// Relative residual `‖Ax‖/(‖A‖‖x‖)` of the first basis vector.
    pub residual: f64,
}

pub fn nullspace(a: &CMatrix, rank_bits: u32, ctx: &PrecisionContext) -> Result<Nullspace> {
    let qr = PivotedQr::new(a, ctx);
    let tol = ctx.real(Float::i_exp(1, -(rank_bits as i32)));
    let rank = qr.rank(&tol);
    let basis = qr.nullspace(rank);
    if basis.is_empty() {
        return Err(Error::Degeneracy("trivial nullspace".into()));
    }
    let residual = relative_residual(a, &basis[0]);
    Ok(Nullspace { basis, rank, residual })
}

/// `A x = b` for square `A` by pivoted QR; the relative residual
/// `‖Ax - b‖/(‖A‖‖x‖ + ‖b‖)` is returned with the solution.
pub fn solve(a: &CMatrix, b: &[Cplx], ctx: &PrecisionContext) -> Result<(Vec<Cplx>, f64)> {
    let qr = PivotedQr::new(a, ctx);
    let x = qr.solve(b)?;
    let ax = a.mul_vec(&x);
    let diff: Vec<Cplx> = ax
        .iter()
        .zip(b)
        .map(|(u, v)| Complex::with_val(ctx.bits(), u - v))
        .collect();
    let scale = a.norm() * vec_norm(&x) + vec_norm(b);
    let residual = if scale.is_zero() {
        0.0
    } else {
        (vec_norm(&diff) / scale).to_f64()
    };
    Ok((x, residual))
}
