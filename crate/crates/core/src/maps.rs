//! Reusable maps and objectives.

use std::ops::Range;

use crate::problem::{Mapping, Objective};

/// Dense row-major matrix, just enough for the small instances used here.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let data: Vec<f64> = rows.iter().flat_map(|row| {
            assert_eq!(row.len(), c, "ragged matrix rows");
            row.iter().copied()
        }).collect();
        Self::new(r, c, data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(rows, cols, vec![0.0; rows * cols])
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `Aᵀ y`.
    pub fn tr_mul_vec(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (i, &yi) in y.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a * yi;
            }
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut m = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        m
    }

    /// Spectral norm, via power iteration on `AᵀA`.
    pub fn spectral_norm(&self) -> f64 {
        let ata = self.transpose().matmul(self);
        let n = ata.rows;
        if n == 0 {
            return 0.0;
        }
        let mut v = vec![1.0; n];
        let mut w = vec![0.0; n];
        let mut lambda = 0.0;
        for _ in 0..500 {
            ata.mul_vec(&v, &mut w);
            let nw = w.iter().map(|a| a * a).sum::<f64>().sqrt();
            if nw == 0.0 {
                return 0.0;
            }
            v.iter_mut().zip(&w).for_each(|(vi, wi)| *vi = wi / nw);
            if (nw - lambda).abs() <= 1e-14 * nw {
                lambda = nw;
                break;
            }
            lambda = nw;
        }
        lambda.sqrt()
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

/// `F(x) = Qx + q`.
#[derive(Debug, Clone)]
pub struct AffineMap {
    pub matrix: Matrix,
    pub offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(matrix: Matrix, offset: Vec<f64>) -> Self {
        assert_eq!(matrix.rows(), matrix.cols(), "affine map must be square");
        assert_eq!(matrix.rows(), offset.len());
        Self { matrix, offset }
    }
}

impl Mapping for AffineMap {
    fn dim(&self) -> usize {
        self.offset.len()
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        self.matrix.mul_vec(x, out);
        out.iter_mut().zip(&self.offset).for_each(|(o, q)| *o += q);
    }

    fn eval_block(&self, x: &[f64], range: Range<usize>, out: &mut [f64]) {
        for (o, i) in out.iter_mut().zip(range) {
            let dotp: f64 = self.matrix.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
            *o = dotp + self.offset[i];
        }
    }

    fn jacobian_transpose_product(&self, _x: &[f64], v: &[f64], out: &mut [f64]) {
        self.matrix.tr_mul_vec(v, out);
    }
}

/// `F ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroMap(pub usize);

impl Mapping for ZeroMap {
    fn dim(&self) -> usize {
        self.0
    }

    fn eval(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }

    fn eval_block(&self, _x: &[f64], _range: Range<usize>, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }

    fn jacobian_transpose_product(&self, _x: &[f64], _v: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
}

/// A map given by a closure writing `F(x)` into its second argument.
pub struct FnMap<G> {
    dim: usize,
    f: G,
}

impl<G> FnMap<G>
where
    G: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, f: G) -> Self {
        Self { dim, f }
    }
}

impl<G> Mapping for FnMap<G>
where
    G: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64], out: &mut [f64]) {
        (self.f)(x, out)
    }
}

/// `f ≡ 0`.
#[derive(Debug, Clone, Copy)]
pub struct ZeroObjective(pub usize);

impl Objective for ZeroObjective {
    fn dim(&self) -> usize {
        self.0
    }

    fn value(&self, _x: &[f64]) -> f64 {
        0.0
    }

    fn subgradient(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }

    fn subgradient_block(&self, _x: &[f64], _range: Range<usize>, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }
}

/// `f(x) = ½‖x − c‖²`; 1-strongly convex.
#[derive(Debug, Clone)]
pub struct SquaredDistance {
    pub center: Vec<f64>,
}

impl SquaredDistance {
    pub fn new(center: Vec<f64>) -> Self {
        Self { center }
    }

    pub fn origin(dim: usize) -> Self {
        Self::new(vec![0.0; dim])
    }
}

impl Objective for SquaredDistance {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        0.5 * x
            .iter()
            .zip(&self.center)
            .map(|(a, c)| (a - c) * (a - c))
            .sum::<f64>()
    }

    fn subgradient(&self, x: &[f64], out: &mut [f64]) {
        for ((o, a), c) in out.iter_mut().zip(x).zip(&self.center) {
            *o = a - c;
        }
    }

    fn subgradient_block(&self, x: &[f64], range: Range<usize>, out: &mut [f64]) {
        for (o, i) in out.iter_mut().zip(range) {
            *o = x[i] - self.center[i];
        }
    }
}

/// `f(x) = ‖x‖₁` with subgradient `sign(x)` (0 at kinks).
#[derive(Debug, Clone, Copy)]
pub struct L1Norm(pub usize);

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Objective for L1Norm {
    fn dim(&self) -> usize {
        self.0
    }

    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v.abs()).sum()
    }

    fn subgradient(&self, x: &[f64], out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(x) {
            *o = sign(v);
        }
    }

    fn subgradient_block(&self, x: &[f64], range: Range<usize>, out: &mut [f64]) {
        for (o, &v) in out.iter_mut().zip(&x[range]) {
            *o = sign(v);
        }
    }
}

/// An objective given by value and subgradient closures.
pub struct FnObjective<V, G> {
    dim: usize,
    value: V,
    grad: G,
}

impl<V, G> FnObjective<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    pub fn new(dim: usize, value: V, grad: G) -> Self {
        Self { dim, value, grad }
    }
}

impl<V, G> Objective for FnObjective<V, G>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    G: Fn(&[f64], &mut [f64]) + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn subgradient(&self, x: &[f64], out: &mut [f64]) {
        (self.grad)(x, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_block_matches_full() {
        let m = AffineMap::new(
            Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]),
            vec![-1.0, 0.5, 2.0],
        );
        let x = [0.3, -1.2, 2.5];
        let mut full = [0.0; 3];
        m.eval(&x, &mut full);
        let mut part = [0.0; 2];
        m.eval_block(&x, 1..3, &mut part);
        assert_eq!(&full[1..3], &part);
    }

    #[test]
    fn spectral_norm_of_diagonal() {
        let m = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, -5.0]]);
        assert!((m.spectral_norm() - 5.0).abs() < 1e-10);
    }

    #[test]
    fn l1_subgradient_is_zero_at_kinks() {
        let f = L1Norm(3);
        let mut g = [9.0; 3];
        f.subgradient(&[0.0, -2.0, 1e-300], &mut g);
        assert_eq!(g, [0.0, -1.0, 1.0]);
        assert_eq!(f.value(&[1.0, -2.0, 0.0]), 3.0);
    }

    #[test]
    fn default_jacobian_transpose_matches_affine() {
        let m = AffineMap::new(
            Matrix::from_rows(&[vec![2.0, 1.0], vec![-1.0, 3.0]]),
            vec![0.0, 1.0],
        );
        let closure = FnMap::new(2, |x: &[f64], out: &mut [f64]| {
            out[0] = 2.0 * x[0] + x[1];
            out[1] = -x[0] + 3.0 * x[1] + 1.0;
        });
        let v = [0.7, -0.4];
        let mut exact = [0.0; 2];
        let mut fd = [0.0; 2];
        m.jacobian_transpose_product(&[1.0, 2.0], &v, &mut exact);
        closure.jacobian_transpose_product(&[1.0, 2.0], &v, &mut fd);
        for (a, b) in exact.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}
