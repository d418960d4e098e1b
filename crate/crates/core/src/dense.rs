//! Cubic-time dense routines used by the honest prover.

use crate::engine::RoleCost;
use crate::field::{Field, Scalar};
use crate::poly::DensePolynomial;

pub type DenseMatrix = Vec<Vec<Scalar>>;

/// Determinant by Gaussian elimination, plus a nonzero kernel vector when
/// the matrix is singular.
pub fn det_and_kernel(field: &Field, a: &DenseMatrix, cost: &mut RoleCost) -> (Scalar, Option<Vec<Scalar>>) {
    let n = a.len();
    let mut m = a.clone();
    let mut det = Scalar::ONE;
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(pr) = (row..n).find(|&r| !m[r][col].is_zero()) else {
            det = Scalar::ZERO;
            continue;
        };
        if pr != row {
            m.swap(pr, row);
            det = field.neg(det);
        }
        det = field.mul(det, m[row][col]);
        let inv = field.inv(m[row][col]).expect("pivot is nonzero");
        for x in m[row][col..].iter_mut() {
            *x = field.mul(*x, inv);
        }
        // full reduction so a kernel vector can be read off directly
        for r in 0..n {
            if r == row || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col];
            let (src, dst) = if r < row {
                let (lo, hi) = m.split_at_mut(row);
                (&hi[0], &mut lo[r])
            } else {
                let (lo, hi) = m.split_at_mut(r);
                (&lo[row], &mut hi[0])
            };
            for c in col..n {
                dst[c] = field.sub(dst[c], field.mul(factor, src[c]));
            }
            cost.field_ops += 2 * (n - col) as u64;
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() == n {
        return (det, None);
    }
    let free = (0..n).find(|c| !pivots.contains(c)).expect("rank deficient");
    let mut w = vec![Scalar::ZERO; n];
    w[free] = Scalar::ONE;
    for (r, &pc) in pivots.iter().enumerate() {
        w[pc] = field.neg(m[r][free]);
    }
    (Scalar::ZERO, Some(w))
}

/// Characteristic polynomial `det(x I - A)` through reduction to upper
/// Hessenberg form.
pub fn charpoly_hessenberg(field: &Field, a: &DenseMatrix, cost: &mut RoleCost) -> DensePolynomial {
    let n = a.len();
    let mut h = a.clone();
    for j in 0..n.saturating_sub(2) {
        let Some(i) = (j + 1..n).find(|&i| !h[i][j].is_zero()) else {
            continue;
        };
        if i != j + 1 {
            h.swap(i, j + 1);
            for row in h.iter_mut() {
                row.swap(i, j + 1);
            }
        }
        let inv = field.inv(h[j + 1][j]).expect("pivot is nonzero");
        for k in j + 2..n {
            let u = field.mul(h[k][j], inv);
            if u.is_zero() {
                continue;
            }
            let (top, bottom) = h.split_at_mut(k);
            for (x, &y) in bottom[0].iter_mut().zip(&top[j + 1]) {
                *x = field.sub(*x, field.mul(u, y));
            }
            for row in h.iter_mut() {
                let t = field.mul(u, row[k]);
                row[j + 1] = field.add(row[j + 1], t);
            }
            cost.field_ops += 4 * n as u64;
        }
    }

    // p_m = (x - h[m-1][m-1]) p_{m-1} - sum_i (prod of subdiagonal) h[m-i-1][m-1] p_{m-i-1}
    let mut polys: Vec<DensePolynomial> = vec![DensePolynomial::one()];
    for m in 1..=n {
        let mut next = polys[m - 1].mul(field, &DensePolynomial::linear(field, h[m - 1][m - 1]));
        let mut t = Scalar::ONE;
        for i in 1..m {
            t = field.mul(t, h[m - i][m - i - 1]);
            let c = field.mul(t, h[m - i - 1][m - 1]);
            if !c.is_zero() {
                next = next.sub(field, &polys[m - i - 1].scale(field, c));
            }
        }
        cost.field_ops += 4 * (m * m) as u64;
        polys.push(next);
    }
    polys.pop().expect("n + 1 polynomials")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(field: &Field, rows: &[&[u64]]) -> DenseMatrix {
        rows.iter().map(|r| r.iter().map(|&x| field.element(x)).collect()).collect()
    }

    #[test]
    fn determinant_examples() {
        let f = Field::new(101).unwrap();
        let mut c = RoleCost::default();
        assert_eq!(det_and_kernel(&f, &fm(&f, &[&[2, 0, 0], &[0, 3, 0], &[0, 0, 5]]), &mut c).0, f.element(30));
        // [[0,1],[1,0]] has determinant -1
        assert_eq!(det_and_kernel(&f, &fm(&f, &[&[0, 1], &[1, 0]]), &mut c).0, f.element(100));
        let (d, w) = det_and_kernel(&f, &fm(&f, &[&[1, 2], &[2, 4]]), &mut c);
        assert!(d.is_zero());
        let w = w.unwrap();
        assert_eq!(f.add(w[0], f.mul(f.element(2), w[1])), Scalar::ZERO);
        assert!(!w.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn charpoly_examples() {
        let f = Field::new(101).unwrap();
        let mut c = RoleCost::default();
        let p = charpoly_hessenberg(&f, &fm(&f, &[&[1, 0], &[0, 2]]), &mut c);
        assert_eq!(p.coeffs(), &[f.element(2), f.from_i64(-3), Scalar::ONE]);
        let z = charpoly_hessenberg(&f, &fm(&f, &[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]), &mut c);
        assert_eq!(z.coeffs(), &[Scalar::ZERO, Scalar::ZERO, Scalar::ZERO, Scalar::ONE]);
        // companion-like with a zero subdiagonal pivot needing a swap
        let m = fm(&f, &[&[1, 2, 3], &[0, 4, 5], &[6, 7, 8]]);
        let p = charpoly_hessenberg(&f, &m, &mut c);
        // det(A) = -3 * ... checked through p(0) = (-1)^3 det(A)
        let (d, _) = det_and_kernel(&f, &m, &mut c);
        assert_eq!(p.eval(&f, Scalar::ZERO), f.neg(d));
    }
}
