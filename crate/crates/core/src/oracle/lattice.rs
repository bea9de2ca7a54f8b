//! Submodules of `(Z/p^a)^dim` kept in Howell form.
//!
//! In a Howell basis every row has a pivot `p^k` at its first nonzero column,
//! entries above a pivot are reduced below it, and for every column `c` the rows
//! whose pivot is at or after `c` span exactly the vectors of the lattice that
//! vanish before `c`. The last property makes kernels and coset normal forms exact.

use crate::ring::mod_inverse;

#[inline]
fn mul_mod(x: u64, y: u64, m: u64) -> u64 {
    if m <= 1 << 32 {
        x * y % m
    } else {
        (x as u128 * y as u128 % m as u128) as u64
    }
}

/// `x - q y` mod `m`, all inputs already reduced.
#[inline]
fn sub_mul(x: u64, q: u64, y: u64, m: u64) -> u64 {
    let t = mul_mod(q, y, m);
    if x >= t {
        x - t
    } else {
        x + (m - t)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Row {
    pub pivot: usize,
    /// Pivot entry is `p^val`.
    pub val: u32,
    pub v: Vec<u64>,
}

#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    p: u64,
    a: u32,
    modulus: u64,
    rows: Vec<Row>,
}

fn valuation(x: u64, p: u64) -> u32 {
    let mut v = 0;
    let mut x = x;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

impl Lattice {
    #[cfg(test)]
    pub fn zero(p: u64, a: u32) -> Self {
        Lattice {
            p,
            a,
            modulus: p.pow(a),
            rows: Vec::new(),
        }
    }

    pub fn full(p: u64, a: u32, dim: usize) -> Self {
        let rows = (0..dim)
            .map(|i| {
                let mut v = vec![0; dim];
                v[i] = 1;
                Row { pivot: i, val: 0, v }
            })
            .collect();
        Lattice {
            p,
            a,
            modulus: p.pow(a),
            rows,
        }
    }

    pub fn span(p: u64, a: u32, dim: usize, gens: impl IntoIterator<Item = Vec<u64>>) -> Self {
        let modulus = p.pow(a);
        let mut pool: Vec<Vec<u64>> = gens
            .into_iter()
            .map(|mut g| {
                debug_assert_eq!(g.len(), dim);
                for x in g.iter_mut() {
                    *x %= modulus;
                }
                g
            })
            .filter(|g| g.iter().any(|&x| x != 0))
            .collect();
        let m = modulus;
        let mut rows: Vec<Row> = Vec::new();
        for col in 0..dim {
            if pool.is_empty() {
                break;
            }
            let mut best: Option<(usize, u32)> = None;
            for (idx, g) in pool.iter().enumerate() {
                if g[col] != 0 {
                    let v = valuation(g[col], p);
                    if best.is_none_or(|(_, bv)| v < bv) {
                        best = Some((idx, v));
                        if v == 0 {
                            break;
                        }
                    }
                }
            }
            let Some((idx, val)) = best else { continue };
            let mut r = pool.swap_remove(idx);
            let pv = p.pow(val);
            let unit = r[col] / pv;
            let inv = mod_inverse(unit, modulus).expect("unit part is invertible");
            for x in r[col..].iter_mut() {
                *x = mul_mod(*x, inv, m);
            }
            debug_assert_eq!(r[col], pv);
            for g in pool.iter_mut() {
                if g[col] == 0 {
                    continue;
                }
                let q = g[col] / pv;
                for (x, &y) in g[col..].iter_mut().zip(&r[col..]) {
                    if y != 0 {
                        *x = sub_mul(*x, q, y, m);
                    }
                }
                debug_assert_eq!(g[col], 0);
            }
            if val > 0 {
                let s = p.pow(a - val);
                let sat: Vec<u64> = r.iter().map(|&y| mul_mod(y, s, m)).collect();
                if sat.iter().any(|&x| x != 0) {
                    pool.push(sat);
                }
            }
            pool.retain(|g| g.iter().any(|&x| x != 0));
            rows.push(Row {
                pivot: col,
                val,
                v: r,
            });
        }
        let mut lat = Lattice { p, a, modulus, rows };
        lat.back_reduce();
        lat
    }

    fn back_reduce(&mut self) {
        let m = self.modulus;
        for i in 0..self.rows.len() {
            let (head, tail) = self.rows.split_at_mut(i);
            let ri = &tail[0];
            let pv = self.p.pow(ri.val);
            for rj in head.iter_mut() {
                let q = rj.v[ri.pivot] / pv;
                if q == 0 {
                    continue;
                }
                for (x, &y) in rj.v[ri.pivot..].iter_mut().zip(&ri.v[ri.pivot..]) {
                    if y != 0 {
                        *x = sub_mul(*x, q, y, m);
                    }
                }
            }
        }
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn basis(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.rows.iter().map(|r| &r.v)
    }

    /// `log_p` of the number of elements.
    pub fn log_size(&self) -> u64 {
        self.rows.iter().map(|r| (self.a - r.val) as u64).sum()
    }

    /// Canonical representative of `v` modulo this lattice.
    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        let m = self.modulus;
        let mut v: Vec<u64> = v.iter().map(|x| x % m).collect();
        for r in &self.rows {
            let pv = self.p.pow(r.val);
            let q = v[r.pivot] / pv;
            if q == 0 {
                continue;
            }
            for (x, &y) in v[r.pivot..].iter_mut().zip(&r.v[r.pivot..]) {
                if y != 0 {
                    *x = sub_mul(*x, q, y, m);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Lattice of `(x, y)` in `image_dim + source_dim` columns; rows of the Howell form whose
    /// pivot lies in the second block span `{y : x = 0}`.
    pub fn split_off_kernel(
        p: u64,
        a: u32,
        image_dim: usize,
        source_dim: usize,
        rows: Vec<Vec<u64>>,
    ) -> Lattice {
        let joint = Lattice::span(p, a, image_dim + source_dim, rows);
        let kernel_rows = joint
            .rows
            .into_iter()
            .filter(|r| r.pivot >= image_dim)
            .map(|r| r.v[image_dim..].to_vec());
        Lattice::span(p, a, source_dim, kernel_rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_subgroups_of_z_mod_p_power() {
        let l = Lattice::span(2, 3, 1, vec![vec![6]]);
        assert_eq!(l.log_size(), 2);
        assert!(l.contains(&[4]));
        assert!(!l.contains(&[1]));
        assert_eq!(l.reduce(&[7]), vec![1]);
    }

    #[test]
    fn saturation_exposes_hidden_rows() {
        // (2, 1) in (Z/4)^2: 2*(2,1) = (0,2) must be in the span.
        let l = Lattice::span(2, 2, 2, vec![vec![2, 1]]);
        assert_eq!(l.log_size(), 2);
        assert!(l.contains(&[0, 2]));
        assert!(!l.contains(&[0, 1]));
    }

    #[test]
    fn kernel_split() {
        // map x -> 2x on Z/8; kernel {0, 4}
        let rows = vec![vec![2, 1]];
        let k = Lattice::split_off_kernel(2, 3, 1, 1, rows);
        assert_eq!(k.log_size(), 1);
        assert!(k.contains(&[4]));
    }

    #[test]
    fn full_and_zero() {
        assert_eq!(Lattice::full(3, 2, 4).log_size(), 8);
        assert_eq!(Lattice::zero(3, 2).log_size(), 0);
    }
}
