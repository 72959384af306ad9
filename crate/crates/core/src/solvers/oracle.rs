use crate::error::{Error, Result};
use crate::linalg::{dist2, norm1, norm2, solve_square, DenseMatrix};

pub const ORACLE_MAX_LEN: usize = 14;
pub const ORACLE_MAX_ROWS: usize = 7;

const FEASIBILITY_TOL: f64 = 1e-9;

/// Exhaustive basis-pursuit solver for tiny instances.
///
/// Some minimizer of `||x||_1` subject to `A x = b` has at most `n` nonzeros,
/// so every support of size `<= n` is tried: least squares on the support,
/// kept if the residual is below `1e-9` (scaled by `max(1, ||b||)`), and the
/// feasible candidate with the smallest l1 norm wins.
pub fn bp_bruteforce_oracle(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let (n, len) = (a.rows(), a.cols());
    if len > ORACLE_MAX_LEN || n > ORACLE_MAX_ROWS {
        return Err(Error::invalid(format!(
            "oracle limited to N <= {ORACLE_MAX_LEN}, n <= {ORACLE_MAX_ROWS}; got {n}x{len}"
        )));
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: b.len(),
            context: "measurement vector",
        });
    }
    let tol = FEASIBILITY_TOL * norm2(b).max(1.0);
    if norm2(b) <= tol {
        return Ok(vec![0.0; len]);
    }
    let columns: Vec<Vec<f64>> = (0..len).map(|j| a.column(j)).collect();

    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut support = Vec::with_capacity(n);
    for size in 1..=n.min(len) {
        support.clear();
        support.extend(0..size);
        loop {
            if let Some(x) = restricted_solve(&columns, &support, b, len) {
                if dist2(&a.mul_vec(&x), b) <= tol {
                    let l1 = norm1(&x);
                    if best.as_ref().is_none_or(|(bl, _)| l1 < *bl) {
                        best = Some((l1, x));
                    }
                }
            }
            if !next_combination(&mut support, len) {
                break;
            }
        }
    }
    best.map(|(_, x)| x).ok_or(Error::Infeasible)
}

fn restricted_solve(columns: &[Vec<f64>], support: &[usize], b: &[f64], len: usize) -> Option<Vec<f64>> {
    let k = support.len();
    let mut gram = DenseMatrix::zeros(k, k);
    let mut rhs = vec![0.0; k];
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            gram[(r, c)] = crate::linalg::dot(&columns[i], &columns[j]);
        }
        rhs[r] = crate::linalg::dot(&columns[i], b);
    }
    let coef = solve_square(&gram, &rhs, 1e-10)?;
    let mut x = vec![0.0; len];
    for (&j, v) in support.iter().zip(coef) {
        x[j] = v;
    }
    Some(x)
}

/// Advance to the next k-subset of `0..len` in lexicographic order.
fn next_combination(c: &mut [usize], len: usize) -> bool {
    let k = c.len();
    for i in (0..k).rev() {
        if c[i] < len - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
