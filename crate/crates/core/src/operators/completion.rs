use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, DenseMatrix};

/// Largest signal length accepted by [`orthonormal_completion`].
pub const MAX_COMPLETION_LEN: usize = 64;

/// A partially orthonormal `A` together with rows `B` such that
/// `Phi = [A; B]` is orthonormal.
#[derive(Debug, Clone)]
pub struct OrthonormalCompletion {
    a: DenseMatrix,
    b: DenseMatrix,
    phi: DenseMatrix,
}

impl OrthonormalCompletion {
    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn b(&self) -> &DenseMatrix {
        &self.b
    }

    /// The stacked square matrix `[A; B]`.
    pub fn phi(&self) -> &DenseMatrix {
        &self.phi
    }

    pub fn observed(&self) -> usize {
        self.a.rows()
    }

    pub fn len(&self) -> usize {
        self.a.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Complete the rows of `a` to an orthonormal basis of `R^N`.
///
/// The complement is built greedily: at each step the canonical basis vector
/// with the largest component outside the current span is projected,
/// re-orthogonalized and normalized.
pub fn orthonormal_completion(a: &DenseMatrix) -> Result<OrthonormalCompletion> {
    let (n, len) = (a.rows(), a.cols());
    if len > MAX_COMPLETION_LEN {
        return Err(Error::invalid(format!(
            "orthonormal completion is limited to N <= {MAX_COMPLETION_LEN}, got {len}"
        )));
    }
    if n > len {
        return Err(Error::invalid("more rows than columns"));
    }
    let deviation = a.gram_rows().identity_deviation();
    if deviation > 1e-8 {
        return Err(Error::NotOrthonormal { deviation });
    }

    let mut basis: Vec<Vec<f64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut used = vec![false; len];
    let mut b_rows = Vec::with_capacity(len - n);
    for _ in n..len {
        let mut best: Option<(usize, Vec<f64>, f64)> = None;
        for j in (0..len).filter(|&j| !used[j]) {
            let mut e = vec![0.0; len];
            e[j] = 1.0;
            project_out(&mut e, &basis);
            let nrm = norm2(&e);
            if best.as_ref().is_none_or(|(_, _, bn)| nrm > *bn) {
                best = Some((j, e, nrm));
            }
        }
        let (j, mut v, _) = best.expect("complement has positive dimension");
        used[j] = true;
        project_out(&mut v, &basis);
        let nrm = norm2(&v);
        v.iter_mut().for_each(|x| *x /= nrm);
        basis.push(v.clone());
        b_rows.push(v);
    }

    let b = if b_rows.is_empty() {
        DenseMatrix::zeros(0, len)
    } else {
        DenseMatrix::from_rows(&b_rows)?
    };
    let phi = a.vstack(&b)?;
    Ok(OrthonormalCompletion { a: a.clone(), b, phi })
}

fn project_out(v: &mut [f64], basis: &[Vec<f64>]) {
    for _pass in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}
