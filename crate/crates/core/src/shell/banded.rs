//! Banded LU factorisation with partial pivoting.
//!
//! Storage is row-wise: entry `(i, j)` lives at `i * width + (j + kl - i)`,
//! valid for `-kl <= j - i <= ku + kl`. The extra `kl` upper diagonals hold
//! the fill produced by row interchanges.

#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
        }
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(
            j + self.kl >= i && j <= i + self.ku + self.kl,
            "({i},{j}) outside band"
        );
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            0.0
        } else {
            self.data[self.offset(i, j)]
        }
    }

    /// Adds `v` to entry `(i, j)`; panics if it lies outside the declared band.
    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(
            j + self.kl >= i && j <= i + self.ku,
            "entry ({i},{j}) outside band kl={} ku={}",
            self.kl,
            self.ku
        );
        let o = self.offset(i, j);
        self.data[o] += v;
    }

    /// Factorises in place. Returns `None` on an exactly singular pivot.
    pub fn factor(mut self) -> Option<BandLu> {
        let (n, kl, ku) = (self.n, self.kl, self.ku);
        let mut pivots = Vec::with_capacity(n);
        let mut lower = vec![0.0; n * kl.max(1)];
        for k in 0..n {
            let last_row = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for r in k + 1..=last_row {
                let v = self.get(r, k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return None;
            }
            let last_col = (k + ku + kl).min(n - 1);
            if p != k {
                for j in k..=last_col {
                    let (a, b) = (self.offset(k, j), self.offset(p, j));
                    self.data.swap(a, b);
                }
            }
            pivots.push(p);
            let pivot = self.get(k, k);
            for r in k + 1..=last_row {
                let o = self.offset(r, k);
                let m = self.data[o] / pivot;
                self.data[o] = 0.0;
                lower[k * kl + (r - k - 1)] = m;
                if m != 0.0 {
                    for j in k + 1..=last_col {
                        let src = self.data[self.offset(k, j)];
                        let dst = self.offset(r, j);
                        self.data[dst] -= m * src;
                    }
                }
            }
        }
        Some(BandLu {
            u: self,
            lower,
            pivots,
        })
    }
}

#[derive(Debug, Clone)]
pub struct BandLu {
    u: BandMatrix,
    lower: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    #[allow(clippy::needless_range_loop)]
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, kl, ku) = (self.u.n, self.u.kl, self.u.ku);
        assert_eq!(b.len(), n);
        for k in 0..n {
            let p = self.pivots[k];
            if p != k {
                b.swap(k, p);
            }
            let bk = b[k];
            for r in k + 1..=(k + kl).min(n - 1) {
                b[r] -= self.lower[k * kl + (r - k - 1)] * bk;
            }
        }
        for k in (0..n).rev() {
            let mut s = b[k];
            for j in k + 1..=(k + ku + kl).min(n - 1) {
                s -= self.u.get(k, j) * b[j];
            }
            b[k] = s / self.u.get(k, k);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn matches_dense_solve_on_random_band() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &(n, kl, ku) in &[(1, 0, 0), (5, 1, 1), (40, 3, 5), (60, 7, 2), (33, 0, 4)] {
            let mut band = BandMatrix::zeros(n, kl, ku);
            let mut dense = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                    // Weak diagonal so pivoting actually happens.
                    let v: f64 = rng.random_range(-1.0..1.0) + if i == j { 0.1 } else { 0.0 };
                    band.add(i, j, v);
                    dense[(i, j)] = v;
                }
            }
            let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let expected = dense
                .clone()
                .lu()
                .solve(&DVector::from_vec(rhs.clone()))
                .unwrap();
            let mut x = rhs.clone();
            band.factor().unwrap().solve_in_place(&mut x);
            for i in 0..n {
                assert!(
                    (x[i] - expected[i]).abs() < 1e-8 * (1.0 + expected[i].abs()),
                    "n={n} i={i}"
                );
            }
        }
    }

    #[test]
    fn singular_is_detected() {
        let mut band = BandMatrix::zeros(3, 1, 1);
        band.add(0, 0, 1.0);
        band.add(1, 0, 1.0);
        assert!(band.factor().is_none());
    }
}
