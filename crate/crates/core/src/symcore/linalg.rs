//! Dense exact linear algebra over `Rat`, plus fraction-free elimination
//! over polynomial entries.

use super::poly::Poly;
use super::rat::Rat;

#[derive(Clone, PartialEq, Eq)]
pub struct RatMat {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<Rat>,
}

impl RatMat {
    pub fn zeros(rows: usize, cols: usize) -> RatMat {
        RatMat {
            rows,
            cols,
            a: vec![Rat::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> RatMat {
        let mut m = RatMat::zeros(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = Rat::ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> RatMat {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c));
        RatMat {
            rows: r,
            cols: c,
            a: rows.into_iter().flatten().collect(),
        }
    }

    pub fn at(&self, i: usize, j: usize) -> &Rat {
        &self.a[i * self.cols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut Rat {
        &mut self.a[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> RatMat {
        let mut t = RatMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *t.at_mut(j, i) = self.at(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMat) -> RatMat {
        assert_eq!(self.cols, other.rows);
        let mut out = RatMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let v = self.at(i, k);
                if v.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let w = other.at(k, j);
                    if !w.is_zero() {
                        *out.at_mut(i, j) += &(v * w);
                    }
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::ZERO;
                for j in 0..self.cols {
                    let a = self.at(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        acc += &(a * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    /// In-place reduced row echelon form; returns pivot column per pivot row.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r >= self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            if p != r {
                for j in 0..self.cols {
                    self.a.swap(r * self.cols + j, p * self.cols + j);
                }
            }
            let inv = self.at(r, c).inv();
            for j in c..self.cols {
                let v = self.at(r, j) * &inv;
                *self.at_mut(r, j) = v;
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.cols {
                        let v = self.at(i, j) - &(&f * self.at(r, j));
                        *self.at_mut(i, j) = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref().len()
    }

    /// Basis of the right kernel.
    pub fn kernel(&self) -> Vec<Vec<Rat>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set.contains(&free) {
                continue;
            }
            let mut v = vec![Rat::ZERO; self.cols];
            v[free] = Rat::ONE;
            for (pr, &pc) in pivots.iter().enumerate() {
                v[pc] = -m.at(pr, free);
            }
            basis.push(v);
        }
        basis
    }

    /// Solve A x = b; None when inconsistent. Free variables are set to zero.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len());
        let mut m = RatMat::zeros(self.rows, self.cols + 1);
        for i in 0..self.rows {
            for j in 0..self.cols {
                *m.at_mut(i, j) = self.at(i, j).clone();
            }
            *m.at_mut(i, self.cols) = b[i].clone();
        }
        let pivots = m.rref();
        if pivots.contains(&self.cols) {
            return None;
        }
        let mut x = vec![Rat::ZERO; self.cols];
        for (pr, &pc) in pivots.iter().enumerate() {
            x[pc] = m.at(pr, self.cols).clone();
        }
        Some(x)
    }

    /// Inverse; None when singular.
    pub fn inverse(&self) -> Option<RatMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = RatMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                *m.at_mut(i, j) = self.at(i, j).clone();
            }
            *m.at_mut(i, n + i) = Rat::ONE;
        }
        let pivots = m.rref();
        if pivots.len() < n || pivots.iter().enumerate().any(|(k, &c)| c != k) {
            return None;
        }
        let mut inv = RatMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                *inv.at_mut(i, j) = m.at(i, n + j).clone();
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut m = self.clone();
        let mut det = Rat::ONE;
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m.at(i, c).is_zero()) else {
                return Rat::ZERO;
            };
            if p != c {
                for j in 0..n {
                    m.a.swap(c * n + j, p * n + j);
                }
                det = -det;
            }
            det *= m.at(c, c);
            let inv = m.at(c, c).inv();
            for i in c + 1..n {
                if m.at(i, c).is_zero() {
                    continue;
                }
                let f = m.at(i, c) * &inv;
                for j in c..n {
                    let v = m.at(i, j) - &(&f * m.at(c, j));
                    *m.at_mut(i, j) = v;
                }
            }
        }
        det
    }
}

impl std::fmt::Debug for RatMat {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.rows {
            writeln!(fm, "{:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Solve M x = b over the fraction field of the polynomial ring by
/// fraction-free (Bareiss) elimination. Returns (numerators, denominator):
/// x_j = num_j / den. None when M is singular.
pub fn poly_bareiss_solve(m: &[Vec<Poly>], b: &[Poly]) -> Option<(Vec<Poly>, Poly)> {
    let n = m.len();
    assert!(m.iter().all(|r| r.len() == n) && b.len() == n);
    if n == 0 {
        return Some((Vec::new(), Poly::one()));
    }
    // augmented fraction-free elimination; a row permutation only permutes
    // the equations, so the solution is unchanged and the extracted
    // denominator is the determinant of the permuted matrix
    let mut a: Vec<Vec<Poly>> = m
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let mut prev = Poly::one();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..=n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t
                    .exact_div(&prev)
                    .expect("Bareiss invariant: exact division");
            }
            a[i][k] = Poly::zero();
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    // back substitution on y_i = det * x_i, which stays polynomial
    let mut num = vec![Poly::zero(); n];
    for i in (0..n).rev() {
        let mut acc = a[i][n].mul(&det);
        for j in i + 1..n {
            acc = acc.sub(&a[i][j].mul(&num[j]));
        }
        num[i] = acc
            .exact_div(&a[i][i])
            .expect("back substitution: exact division");
    }
    Some((num, det))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rat {
        Rat::int(n)
    }

    #[test]
    fn rref_solve_kernel() {
        let m = RatMat::from_rows(vec![
            vec![r(1), r(2), r(3)],
            vec![r(2), r(4), r(6)],
            vec![r(1), r(0), r(1)],
        ]);
        assert_eq!(m.rank(), 2);
        let k = m.kernel();
        assert_eq!(k.len(), 1);
        assert!(m.mul_vec(&k[0]).iter().all(|x| x.is_zero()));
        let b = vec![r(6), r(12), r(2)];
        let x = m.solve(&b).unwrap();
        assert_eq!(m.mul_vec(&x), b);
    }

    #[test]
    fn inverse_and_det() {
        let m = RatMat::from_rows(vec![vec![r(2), r(1)], vec![r(1), r(1)]]);
        assert_eq!(m.det(), r(1));
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), RatMat::identity(2));
        let s = RatMat::from_rows(vec![vec![r(1), r(2)], vec![r(2), r(4)]]);
        assert_eq!(s.det(), r(0));
        assert!(s.inverse().is_none());
    }

    #[test]
    fn bareiss_polynomial_solve() {
        // [[x, 1], [1, x]] * v = [1, 0]  =>  v = (x, -1)/(x^2-1)
        let x = Poly::var(0);
        let m = vec![
            vec![x.clone(), Poly::one()],
            vec![Poly::one(), x.clone()],
        ];
        let b = vec![Poly::one(), Poly::zero()];
        let (num, den) = poly_bareiss_solve(&m, &b).unwrap();
        // check m * num = b * den
        for i in 0..2 {
            let mut acc = Poly::zero();
            for j in 0..2 {
                acc.add_assign(&m[i][j].mul(&num[j]));
            }
            assert_eq!(acc, b[i].mul(&den));
        }
    }
}
