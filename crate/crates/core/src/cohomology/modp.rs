//! Linear algebra over the prime field `Z/p`.

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = ((r as u128 * b as u128) % p as u128) as u64;
        }
        b = ((b as u128 * b as u128) % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn mul(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

/// Dense row-major matrix over `Z/p`.
#[derive(Clone, Debug)]
pub(crate) struct ModMatrix {
    pub rows: usize,
    pub cols: usize,
    pub p: u64,
    pub data: Vec<u64>,
}

impl ModMatrix {
    pub fn from_fn(rows: usize, cols: usize, p: u64, mut f: impl FnMut(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c) % p);
            }
        }
        Self { rows, cols, p, data }
    }

    fn at(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    /// Reduced row echelon form in place; returns pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let p = self.p;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(sel) = (row..self.rows).find(|&r| self.at(r, col) != 0) else { continue };
            for c in 0..self.cols {
                self.data.swap(sel * self.cols + c, row * self.cols + c);
            }
            let inv = inv_mod(self.at(row, col), p);
            for c in 0..self.cols {
                let v = mul(self.at(row, c), inv, p);
                self.data[row * self.cols + c] = v;
            }
            for r in 0..self.rows {
                if r != row {
                    let f = self.at(r, col);
                    if f != 0 {
                        for c in 0..self.cols {
                            let v = (self.at(r, c) + p - mul(f, self.at(row, c), p)) % p;
                            self.data[r * self.cols + c] = v;
                        }
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Basis of the right null space.
    pub fn null_space(&self) -> Vec<Vec<u64>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let p = self.p;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![0u64; self.cols];
                v[f] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = (p - m.at(r, f)) % p;
                }
                v
            })
            .collect()
    }

    #[cfg(test)]
    pub fn mul_vec(&self, v: &[u64]) -> Vec<u64> {
        (0..self.rows)
            .map(|r| (0..self.cols).fold(0u64, |acc, c| (acc + mul(self.at(r, c), v[c], self.p)) % self.p))
            .collect()
    }
}

/// Solves `M y = b` over `Z/p` for a matrix with independent columns; `None`
/// if `b` is outside the column span.
pub(crate) fn solve_columns(columns: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = b.len();
    let k = columns.len();
    let mut aug = ModMatrix::from_fn(n, k + 1, p, |r, c| if c < k { columns[c][r] } else { b[r] });
    let pivots = aug.rref();
    if pivots.contains(&k) {
        return None;
    }
    let mut y = vec![0u64; k];
    for (r, &pc) in pivots.iter().enumerate() {
        y[pc] = aug.at(r, k);
    }
    Some(y)
}

/// Greedy selection of columns independent of all earlier ones.
pub(crate) fn independent_columns(columns: &[Vec<u64>], n: usize, p: u64) -> Vec<usize> {
    let mut m = ModMatrix::from_fn(n, columns.len(), p, |r, c| columns[c][r]);
    m.rref()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        assert!(is_prime(2) && is_prime(3) && is_prime(13));
        assert!(!is_prime(0) && !is_prime(1) && !is_prime(9));
    }

    #[test]
    fn null_space_mod_two() {
        let m = ModMatrix::from_fn(1, 3, 2, |_, _| 1);
        let ns = m.null_space();
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(m.mul_vec(&v), vec![0]);
        }
    }

    #[test]
    fn solve_mod_five() {
        let cols = vec![vec![1, 2], vec![0, 1]];
        let y = solve_columns(&cols, &[3, 4], 5).unwrap();
        // 3·(1,2) + y1·(0,1) = (3, 6 + y1) ≡ (3, 4) → y1 = 3
        assert_eq!(y, vec![3, 3]);
        assert!(solve_columns(&[vec![1, 1]], &[1, 0], 5).is_none());
    }
}
