//! Brute-force reference solvers for small instances. They enumerate
//! combinatorial structure (complementarity patterns, active sets, vertices)
//! and are meant for checking the iterative solvers, not for production use.

use nalgebra::{DMatrix, DVector};

use crate::maps::Matrix;

const PINV_EPS: f64 = 1e-12;

fn pinv(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.ncols(), m.nrows());
    }
    m.clone()
        .pseudo_inverse(PINV_EPS)
        .expect("pseudo-inverse with a positive epsilon")
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..(1u64 << n)).map(move |mask| (0..n).map(|i| mask >> i & 1 == 1).collect())
}

/// Every solution of the affine complementarity problem
/// `x ≥ 0, Qx + q ≥ 0, xᵀ(Qx + q) = 0` that arises from a complementarity
/// pattern: for each support set `S`, solve `Q_SS x_S = −q_S` (least
/// squares) and keep the result when it satisfies all conditions within
/// `tol`. For `Q ≻ 0` the list holds exactly one point.
pub fn lcp_pattern_solutions(q_mat: &Matrix, q: &[f64], tol: f64) -> Vec<Vec<f64>> {
    let n = q.len();
    assert!(n <= 20, "pattern enumeration is exponential in n");
    let qm = q_mat.to_nalgebra();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for support in subsets(n) {
        let idx: Vec<usize> = (0..n).filter(|&i| support[i]).collect();
        let mut x = vec![0.0; n];
        if !idx.is_empty() {
            let sub = qm.select_rows(&idx).select_columns(&idx);
            let rhs = DVector::from_iterator(idx.len(), idx.iter().map(|&i| -q[i]));
            let sol = pinv(&sub) * &rhs;
            for (k, &i) in idx.iter().enumerate() {
                x[i] = sol[k];
            }
        }
        let mut w = vec![0.0; n];
        q_mat.mul_vec(&x, &mut w);
        w.iter_mut().zip(q).for_each(|(wi, qi)| *wi += qi);
        let ok = (0..n).all(|i| {
            x[i] >= -tol && w[i] >= -tol && (x[i] * w[i]).abs() <= tol * (1.0 + x[i].abs() + w[i].abs())
        });
        if ok && !out.iter().any(|y| crate::block::dist(y, &x) <= tol) {
            out.push(x);
        }
    }
    out
}

/// Euclidean projection of `z0` onto `{z : E z = e, G z ≤ g}` by
/// enumerating which inequalities are active. For each active set the
/// projection onto the affine hull is computed in closed form; the nearest
/// candidate that is feasible within `tol` is returned. `None` means no
/// feasible candidate was found.
pub fn polyhedral_projection(
    z0: &[f64],
    eq: (&Matrix, &[f64]),
    ineq: (&Matrix, &[f64]),
    tol: f64,
) -> Option<Vec<f64>> {
    let n = z0.len();
    let (e_mat, e_rhs) = eq;
    let (g_mat, g_rhs) = ineq;
    let n_ineq = g_rhs.len();
    assert!(n_ineq <= 24, "active-set enumeration is exponential");
    let z0v = DVector::from_column_slice(z0);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for active in subsets(n_ineq) {
        let act: Vec<usize> = (0..n_ineq).filter(|&i| active[i]).collect();
        if act.len() > n {
            continue;
        }
        let rows = e_rhs.len() + act.len();
        let mut m = DMatrix::zeros(rows, n);
        let mut rhs = DVector::zeros(rows);
        for i in 0..e_rhs.len() {
            for j in 0..n {
                m[(i, j)] = e_mat.get(i, j);
            }
            rhs[i] = e_rhs[i];
        }
        for (k, &a) in act.iter().enumerate() {
            let r = e_rhs.len() + k;
            for j in 0..n {
                m[(r, j)] = g_mat.get(a, j);
            }
            rhs[r] = g_rhs[a];
        }
        let z = if rows == 0 {
            z0v.clone()
        } else {
            &z0v - pinv(&m) * (&m * &z0v - &rhs)
        };
        if rows > 0 && (&m * &z - &rhs).amax() > tol {
            continue;
        }
        let feasible = (0..n_ineq).all(|i| {
            (0..n).map(|j| g_mat.get(i, j) * z[j]).sum::<f64>() <= g_rhs[i] + tol
        });
        if !feasible {
            continue;
        }
        let d = (&z - &z0v).norm();
        if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
            best = Some((d, z.iter().copied().collect()));
        }
    }
    best.map(|(_, z)| z)
}

/// Projection onto the balanced capacity set through
/// [`polyhedral_projection`].
pub fn balanced_projection_oracle(caps: &[f64], y0: &[f64], s0: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let j = caps.len();
    let n = 2 * j;
    let mut e = vec![0.0; n];
    e[..j].iter_mut().for_each(|v| *v = 1.0);
    e[j..].iter_mut().for_each(|v| *v = -1.0);
    let e_mat = Matrix::new(1, n, e);
    // y ≤ B, −y ≤ 0, −s ≤ 0
    let mut g_rows = Vec::with_capacity(3 * j);
    let mut h = Vec::with_capacity(3 * j);
    for k in 0..j {
        let mut row = vec![0.0; n];
        row[k] = 1.0;
        g_rows.push(row);
        h.push(caps[k]);
        let mut row = vec![0.0; n];
        row[k] = -1.0;
        g_rows.push(row);
        h.push(0.0);
        let mut row = vec![0.0; n];
        row[j + k] = -1.0;
        g_rows.push(row);
        h.push(0.0);
    }
    let g = Matrix::from_rows(&g_rows);
    let z0: Vec<f64> = y0.iter().chain(s0).copied().collect();
    let z = polyhedral_projection(&z0, (&e_mat, &[0.0]), (&g, &h), 1e-10)?;
    Some((z[..j].to_vec(), z[j..].to_vec()))
}

/// `argmin ½‖x − c‖²` over the solution set of the monotone affine
/// complementarity problem with symmetric positive semidefinite `Q`.
///
/// All solutions share `w = Qx + q`, and the solution set is
/// `{x ≥ 0 : Q x = Q x̂, x_i = 0 where w_i > 0}` for any pattern solution
/// `x̂`. That polyhedron is handed to [`polyhedral_projection`].
pub fn lcp_least_distance_solution(q_mat: &Matrix, q: &[f64], c: &[f64], tol: f64) -> Option<Vec<f64>> {
    let n = q.len();
    let sols = lcp_pattern_solutions(q_mat, q, tol);
    let xhat = sols.first()?;
    let mut qx = vec![0.0; n];
    q_mat.mul_vec(xhat, &mut qx);
    let w: Vec<f64> = qx.iter().zip(q).map(|(a, b)| a + b).collect();

    let mut eq_rows: Vec<Vec<f64>> = (0..n).map(|i| q_mat.row(i).to_vec()).collect();
    let mut eq_rhs = qx.clone();
    for i in 0..n {
        if w[i] > tol {
            let mut row = vec![0.0; n];
            row[i] = 1.0;
            eq_rows.push(row);
            eq_rhs.push(0.0);
        }
    }
    let g_rows: Vec<Vec<f64>> = (0..n)
        .filter(|&i| w[i] <= tol)
        .map(|i| {
            let mut row = vec![0.0; n];
            row[i] = -1.0;
            row
        })
        .collect();
    let h = vec![0.0; g_rows.len()];
    let g = if g_rows.is_empty() {
        Matrix::zeros(0, n)
    } else {
        Matrix::from_rows(&g_rows)
    };
    polyhedral_projection(c, (&Matrix::from_rows(&eq_rows), &eq_rhs), (&g, &h), 1e-9)
}

/// `min ‖x‖₁` over `{Ax = b, lower ≤ x ≤ upper}` by vertex enumeration.
///
/// On each orthant the objective is linear, so the minimum sits at a vertex
/// of the polyhedron intersected with that orthant: `rank(A)` basic
/// coordinates solve the equations while the others sit at a value in
/// `{lower_i, 0, upper_i}`. Returns the minimizer and the minimum, or `None`
/// when no feasible vertex exists.
pub fn l1_box_oracle(a: &Matrix, b: &[f64], lower: &[f64], upper: &[f64]) -> Option<(Vec<f64>, f64)> {
    let n = a.cols();
    let am = a.to_nalgebra();
    let rank = if a.rows() == 0 { 0 } else { am.rank(1e-10) };
    let scale = 1.0 + b.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let candidates: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut v = vec![lower[i], upper[i]];
            if lower[i] < 0.0 && upper[i] > 0.0 {
                v.push(0.0);
            }
            v
        })
        .collect();

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut basis: Vec<usize> = (0..rank).collect();
    loop {
        let nonbasic: Vec<usize> = (0..n).filter(|i| !basis.contains(i)).collect();
        let sub_pinv = if rank > 0 {
            Some(pinv(&am.select_columns(&basis)))
        } else {
            None
        };
        let mut digits = vec![0usize; nonbasic.len()];
        'patterns: loop {
            let mut x = vec![0.0; n];
            for (k, &i) in nonbasic.iter().enumerate() {
                x[i] = candidates[i][digits[k]];
            }
            let mut resid = vec![0.0; a.rows()];
            a.mul_vec(&x, &mut resid);
            let rhs = DVector::from_iterator(a.rows(), resid.iter().zip(b).map(|(ax, bi)| bi - ax));
            if let Some(p) = &sub_pinv {
                let xb = p * &rhs;
                for (k, &i) in basis.iter().enumerate() {
                    x[i] = xb[k];
                }
            }
            a.mul_vec(&x, &mut resid);
            let eq_ok = resid.iter().zip(b).all(|(ax, bi)| (ax - bi).abs() <= 1e-9 * scale);
            let box_ok = (0..n).all(|i| x[i] >= lower[i] - 1e-12 && x[i] <= upper[i] + 1e-12);
            if eq_ok && box_ok {
                let val: f64 = x.iter().map(|v| v.abs()).sum();
                if best.as_ref().is_none_or(|(_, bv)| val < *bv) {
                    best = Some((x, val));
                }
            }
            // advance the mixed-radix counter
            for k in 0..digits.len() {
                digits[k] += 1;
                if digits[k] < candidates[nonbasic[k]].len() {
                    continue 'patterns;
                }
                digits[k] = 0;
            }
            break;
        }
        // next basis in lexicographic order
        let mut i = rank;
        loop {
            if i == 0 {
                return best.map(|(x, v)| {
                    let x = x.into_iter().zip(lower.iter().zip(upper)).map(|(v, (l, u))| v.clamp(*l, *u)).collect();
                    (x, v)
                });
            }
            i -= 1;
            if basis[i] < n - rank + i {
                basis[i] += 1;
                for k in i + 1..rank {
                    basis[k] = basis[k - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcp_identity_example() {
        let sols = lcp_pattern_solutions(&Matrix::identity(2), &[-1.0, 2.0], 1e-12);
        assert_eq!(sols, vec![vec![1.0, 0.0]]);
    }

    #[test]
    fn degenerate_face_projection() {
        // x₃ is free on the solution set; the nearest solution copies c₃.
        let q = Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 0.0]]);
        let x = lcp_least_distance_solution(&q, &[-1.0, -1.0, 0.0], &[0.0, 0.0, 0.5], 1e-10).unwrap();
        let expect = [1.0 / 3.0, 1.0 / 3.0, 0.5];
        for (a, b) in x.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9, "{x:?}");
        }
        let x = lcp_least_distance_solution(&q, &[-1.0, -1.0, 0.0], &[0.0, 0.0, -0.5], 1e-10).unwrap();
        assert!(x[2].abs() < 1e-9);
    }

    #[test]
    fn balanced_oracle_small_cases() {
        let (y, s) = balanced_projection_oracle(&[10.0], &[10.0], &[4.0]).unwrap();
        assert!((y[0] - 7.0).abs() < 1e-9 && (s[0] - 7.0).abs() < 1e-9);
        let (y, s) = balanced_projection_oracle(&[10.0], &[-5.0], &[3.0]).unwrap();
        assert!(y[0].abs() < 1e-9 && s[0].abs() < 1e-9);
    }

    #[test]
    fn l1_segment() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]);
        let (x, v) = l1_box_oracle(&a, &[1.0], &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        assert!((x[0] + x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn l1_zero_rhs() {
        let a = Matrix::from_rows(&[vec![1.0, -2.0, 0.5], vec![0.0, 1.0, 1.0]]);
        let (x, v) = l1_box_oracle(&a, &[0.0, 0.0], &[-1.0; 3], &[1.0; 3]).unwrap();
        assert_eq!(v, 0.0);
        assert!(x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn l1_infeasible() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0]]);
        assert!(l1_box_oracle(&a, &[5.0], &[-1.0; 2], &[1.0; 2]).is_none());
    }
}
