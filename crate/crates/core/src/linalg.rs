//! Small dense matrices over an arbitrary [`Scalar`] domain.

use crate::scalar::Scalar;

/// Row-major square matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    n: usize,
    entries: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix { n, entries: rows.into_iter().flatten().collect() }
    }

    pub fn identity(n: usize, like: &S) -> Self {
        let mut entries = vec![like.zero_like(); n * n];
        for i in 0..n {
            entries[i * n + i] = like.one_like();
        }
        Matrix { n, entries }
    }

    pub fn diagonal(diag: Vec<S>) -> Self {
        let n = diag.len();
        let zero = diag[0].zero_like();
        let mut entries = vec![zero; n * n];
        for (i, d) in diag.into_iter().enumerate() {
            entries[i * n + i] = d;
        }
        Matrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { n: self.n, entries: self.entries.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix { n, entries }
    }

    pub fn mul(&self, rhs: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.get(0, 0).zero_like();
                for k in 0..n {
                    acc = acc + self.get(i, k).clone() * rhs.get(k, j).clone();
                }
                entries.push(acc);
            }
        }
        Matrix { n, entries }
    }

    pub fn scale(&self, c: &S) -> Matrix<S> {
        Matrix { n: self.n, entries: self.entries.iter().map(|x| x.clone() * c.clone()).collect() }
    }

    pub fn add(&self, rhs: &Matrix<S>) -> Matrix<S> {
        Matrix {
            n: self.n,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a.clone() + b.clone()).collect(),
        }
    }

    /// `g * self * g^t`.
    pub fn congruence(&self, g: &Matrix<S>) -> Matrix<S> {
        g.mul(self).mul(&g.transpose())
    }

    pub fn det(&self) -> S {
        det_division_free(&self.entries, self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.vanishes())
    }

    /// Inverse via the adjugate; requires a unit determinant.
    pub fn inverse(&self) -> Option<Matrix<S>> {
        let n = self.n;
        let d_inv = self.det().inverse()?;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                // (i, j) entry of the adjugate is the (j, i) cofactor.
                let minor = self.minor(j, i);
                let c = minor.det();
                let c = if (i + j) % 2 == 0 { c } else { -c };
                entries.push(c * d_inv.clone());
            }
        }
        Some(Matrix { n, entries })
    }

    fn minor(&self, skip_row: usize, skip_col: usize) -> Matrix<S> {
        let n = self.n;
        if n == 1 {
            return Matrix { n: 0, entries: Vec::new() };
        }
        let mut entries = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != skip_row) {
            for j in (0..n).filter(|&j| j != skip_col) {
                entries.push(self.get(i, j).clone());
            }
        }
        Matrix { n: n - 1, entries }
    }
}

/// Determinant by dynamic programming over column subsets; uses only ring
/// operations, so it is valid over `Z/mZ` and other non-fields.
pub fn det_division_free<S: Scalar>(entries: &[S], n: usize) -> S {
    if n == 0 {
        panic!("determinant of an empty matrix needs a domain witness");
    }
    let zero = entries[0].zero_like();
    let mut dp: Vec<Option<S>> = vec![None; 1 << n];
    dp[0] = Some(entries[0].one_like());
    for mask in 0usize..(1 << n) {
        let row = mask.count_ones() as usize;
        if row >= n {
            continue;
        }
        let Some(cur) = dp[mask].clone() else { continue };
        if cur.vanishes() {
            continue;
        }
        for col in 0..n {
            if mask & (1 << col) != 0 {
                continue;
            }
            let a = &entries[row * n + col];
            if a.vanishes() {
                continue;
            }
            // sign: number of already-used columns to the right of `col`
            let inversions = (mask >> (col + 1)).count_ones();
            let term = cur.clone() * a.clone();
            let term = if inversions % 2 == 0 { term } else { -term };
            let next = mask | (1 << col);
            dp[next] = Some(match dp[next].take() {
                Some(v) => v + term,
                None => term,
            });
        }
    }
    dp[(1 << n) - 1].clone().unwrap_or(zero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn m(rows: &[&[i64]]) -> Matrix<BigInt> {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    #[test]
    fn determinants() {
        assert_eq!(m(&[&[2, 1], &[7, 4]]).det(), BigInt::from(1));
        assert_eq!(m(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 10]]).det(), BigInt::from(-3));
        let p = m(&[&[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1], &[1, 0, 0, 0]]);
        assert_eq!(p.det(), BigInt::from(-1));
    }

    #[test]
    fn determinant_matches_leibniz_on_random_matrices() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let e: Vec<i64> = (0..16).map(|_| rng.gen_range(-9..=9)).collect();
            let mut leibniz = 0i64;
            let perms = permutations(4);
            for p in perms {
                let sign = if inversions(&p) % 2 == 0 { 1 } else { -1 };
                leibniz += sign * (0..4).map(|i| e[i * 4 + p[i]]).product::<i64>();
            }
            let big: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
            assert_eq!(det_division_free(&big, 4), BigInt::from(leibniz));
        }
    }

    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for pos in 0..n {
                let mut q = p.clone();
                q.insert(pos, n - 1);
                out.push(q);
            }
        }
        out
    }

    fn inversions(p: &[usize]) -> usize {
        let mut c = 0;
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if p[i] > p[j] {
                    c += 1;
                }
            }
        }
        c
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1], &[7, 4]]);
        let inv = a.inverse().unwrap();
        assert_eq!(a.mul(&inv), Matrix::identity(2, &BigInt::from(0)));
        assert!(m(&[&[2, 0], &[0, 1]]).inverse().is_none());
    }
}
