//! Integer Smith-normal-form diagonalization, enough to read off ranks and
//! cokernel torsion. Entries are arbitrary-precision; pivoting always takes
//! a minimal nonzero entry to keep growth down.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

#[derive(Clone, Debug)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.data[r * self.cols + c] = v;
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for c in 0..self.cols {
            let v = self.get(src, c) * q;
            let cur = self.get(dst, c) + v;
            self.set(dst, c, cur);
        }
    }

    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for r in 0..self.rows {
            let v = self.get(r, src) * q;
            let cur = self.get(r, dst) + v;
            self.set(r, dst, cur);
        }
    }
}

/// Diagonalize by unimodular row/column operations and return the nonzero
/// diagonal entries (positive). The multiset of their prime powers is the
/// cokernel torsion data; the count is the rank.
pub fn smith_diagonal(mut m: IntMatrix) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.rows && t < m.cols {
        // locate a minimal-absolute-value nonzero pivot in the working block
        let mut pivot: Option<(usize, usize)> = None;
        for r in t..m.rows {
            for c in t..m.cols {
                if m.get(r, c).is_zero() {
                    continue;
                }
                match &pivot {
                    None => pivot = Some((r, c)),
                    Some((pr, pc)) => {
                        if m.get(r, c).abs() < m.get(*pr, *pc).abs() {
                            pivot = Some((r, c));
                        }
                    }
                }
            }
        }
        let Some((pr, pc)) = pivot else { break };
        m.swap_rows(t, pr);
        m.swap_cols(t, pc);
        // clear row and column t; restarts happen when remainders appear
        loop {
            let mut clean = true;
            for r in t + 1..m.rows {
                if m.get(r, t).is_zero() {
                    continue;
                }
                let q = -(m.get(r, t) / m.get(t, t));
                m.add_row_multiple(r, t, &q);
                if !m.get(r, t).is_zero() {
                    // remainder strictly smaller than the pivot: promote it
                    m.swap_rows(t, r);
                    clean = false;
                }
            }
            for c in t + 1..m.cols {
                if m.get(t, c).is_zero() {
                    continue;
                }
                let q = -(m.get(t, c) / m.get(t, t));
                m.add_col_multiple(c, t, &q);
                if !m.get(t, c).is_zero() {
                    m.swap_cols(t, c);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        out.push(m.get(t, t).abs());
        t += 1;
    }
    out
}

/// Rank over the rationals, via the same elimination.
pub fn rank(m: IntMatrix) -> usize {
    smith_diagonal(m).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: usize, cols: usize, vals: &[i64]) -> IntMatrix {
        let mut m = IntMatrix::zero(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, BigInt::from(vals[r * cols + c]));
            }
        }
        m
    }

    #[test]
    fn identity_and_zero() {
        let d = smith_diagonal(mat(2, 2, &[1, 0, 0, 1]));
        assert_eq!(d, vec![BigInt::from(1), BigInt::from(1)]);
        assert!(smith_diagonal(mat(2, 3, &[0; 6])).is_empty());
    }

    #[test]
    fn classic_example() {
        // invariant factors of [[2,4,4],[-6,6,12],[10,-4,-16]] are (2,6,12)
        let d = smith_diagonal(mat(3, 3, &[2, 4, 4, -6, 6, 12, 10, -4, -16]));
        let prod: BigInt = d.iter().product();
        assert_eq!(prod, BigInt::from(144));
        assert_eq!(d.len(), 3);
        // the 2-part multiset is group-invariant: {2, 2, 4}
        let mut twos: Vec<u32> = d
            .iter()
            .map(|x| {
                let mut v = 0;
                let mut x = x.clone();
                while &x % 2 == BigInt::from(0) {
                    x /= 2;
                    v += 1;
                }
                v
            })
            .collect();
        twos.sort_unstable();
        assert_eq!(twos, vec![1, 1, 2]);
    }

    #[test]
    fn torsion_counts_are_invariant() {
        // [[2,0],[0,2]] has cokernel (Z/2)^2, never Z/4
        let d = smith_diagonal(mat(2, 2, &[2, 0, 0, 2]));
        let twos = d.iter().filter(|x| *x == &BigInt::from(2)).count();
        assert_eq!(twos, 2);
        let d = smith_diagonal(mat(2, 2, &[0, 4, 2, 2]));
        let prod: BigInt = d.iter().product();
        assert_eq!(prod, BigInt::from(8));
    }

    #[test]
    fn rank_of_rectangular() {
        assert_eq!(rank(mat(2, 3, &[1, 2, 3, 2, 4, 6])), 1);
        assert_eq!(rank(mat(2, 3, &[1, 2, 3, 0, 1, 1])), 2);
    }
}
