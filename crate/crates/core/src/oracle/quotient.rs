//! Finite modules `S / L` inside `A = (+)_i (Z/p^a)[u]/u^{B_i}`, with `L <= S`
//! both stable under `u`. Coordinates of block `i` are the coefficients of
//! `1, u, ..., u^{B_i - 1}`.

use super::lattice::Lattice;

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Ambient {
    p: u64,
    a: u32,
    modulus: u64,
    bounds: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Ambient {
    pub fn new(p: u64, a: u32, bounds: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(bounds.len());
        let mut dim = 0;
        for &b in &bounds {
            offsets.push(dim);
            dim += b;
        }
        Ambient {
            p,
            a,
            modulus: p.pow(a),
            bounds,
            offsets,
            dim,
        }
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.a
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[usize] {
        &self.bounds
    }

    pub fn max_bound(&self) -> usize {
        self.bounds.iter().copied().max().unwrap_or(0)
    }

    /// `u^k e_i`, or zero when `k >= B_i`.
    pub fn basis_vector(&self, i: usize, k: usize) -> Vec<u64> {
        let mut v = vec![0; self.dim];
        if k < self.bounds[i] {
            v[self.offsets[i] + k] = 1 % self.modulus;
        }
        v
    }

    /// Vector whose block `i` holds the series `blocks[i]` (residues, any modulus divisible by `p^a`).
    pub fn embed(&self, blocks: &[&[u64]]) -> Vec<u64> {
        debug_assert_eq!(blocks.len(), self.blocks());
        let mut v = vec![0; self.dim];
        for (i, c) in blocks.iter().enumerate() {
            for (k, &x) in c.iter().take(self.bounds[i]).enumerate() {
                v[self.offsets[i] + k] = x % self.modulus;
            }
        }
        v
    }

    pub fn block<'a>(&self, v: &'a [u64], i: usize) -> &'a [u64] {
        &v[self.offsets[i]..self.offsets[i] + self.bounds[i]]
    }

    /// `s * v` for a series `s` given by its coefficients.
    pub fn mul(&self, s: &[u64], v: &[u64]) -> Vec<u64> {
        let m = self.modulus as u128;
        let terms: Vec<(usize, u128)> = s
            .iter()
            .enumerate()
            .filter_map(|(j, &c)| {
                let c = c % self.modulus;
                (c != 0 && j < self.max_bound()).then_some((j, c as u128))
            })
            .collect();
        let mut out = vec![0u64; self.dim];
        for (i, &b) in self.bounds.iter().enumerate() {
            let off = self.offsets[i];
            for k in 0..b {
                let x = v[off + k];
                if x == 0 {
                    continue;
                }
                for &(j, c) in &terms {
                    if k + j >= b {
                        break;
                    }
                    let slot = &mut out[off + k + j];
                    *slot = ((*slot as u128 + c * x as u128) % m) as u64;
                }
            }
        }
        out
    }

    pub fn shift(&self, v: &[u64], k: usize) -> Vec<u64> {
        let mut out = vec![0u64; self.dim];
        for (i, &b) in self.bounds.iter().enumerate() {
            let off = self.offsets[i];
            for t in k..b {
                out[off + t] = v[off + t - k];
            }
        }
        out
    }

    pub fn scale(&self, c: u64, v: &[u64]) -> Vec<u64> {
        let m = self.modulus as u128;
        let c = (c % self.modulus) as u128;
        v.iter().map(|&x| (x as u128 * c % m) as u64).collect()
    }

    /// Image of `v` under the reduction to a coarser ambient with the same number of blocks.
    pub fn project(&self, target: &Ambient, v: &[u64]) -> Vec<u64> {
        debug_assert_eq!(self.blocks(), target.blocks());
        let blocks: Vec<&[u64]> = (0..self.blocks()).map(|i| self.block(v, i)).collect();
        target.embed(&blocks)
    }

    pub fn span(&self, gens: impl IntoIterator<Item = Vec<u64>>) -> Lattice {
        Lattice::span(self.p, self.a, self.dim, gens)
    }

    /// Smallest `u`-stable lattice containing `gens`.
    pub fn module_span(&self, gens: impl IntoIterator<Item = Vec<u64>>) -> Lattice {
        let mut all = Vec::new();
        for g in gens {
            let mut cur = g;
            while cur.iter().any(|&x| x != 0) {
                let next = self.shift(&cur, 1);
                all.push(cur);
                cur = next;
            }
        }
        self.span(all)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Quotient {
    amb: Ambient,
    sub: Lattice,
    rel: Lattice,
}

impl Quotient {
    /// `A / (relations)`, the relations closed up under `u`.
    pub fn new(amb: Ambient, relations: impl IntoIterator<Item = Vec<u64>>) -> Self {
        let rel = amb.module_span(relations);
        let sub = Lattice::full(amb.p(), amb.exponent(), amb.dim());
        Quotient { amb, sub, rel }
    }

    pub fn ambient(&self) -> &Ambient {
        &self.amb
    }

    pub fn sub(&self) -> &Lattice {
        &self.sub
    }

    pub fn rel(&self) -> &Lattice {
        &self.rel
    }

    pub fn log_size(&self) -> u64 {
        self.sub.log_size() - self.rel.log_size()
    }

    pub fn is_zero(&self, v: &[u64]) -> bool {
        self.rel.contains(v)
    }

    pub fn reduce(&self, v: &[u64]) -> Vec<u64> {
        self.rel.reduce(v)
    }

    /// Group generators of the module.
    pub fn generators(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.sub.basis()
    }

    pub fn kills(&self, s: &[u64]) -> bool {
        self.generators().all(|b| self.is_zero(&self.amb.mul(s, b)))
    }

    fn image_lattice(&self, s: &[u64]) -> Lattice {
        let gens: Vec<Vec<u64>> = self
            .generators()
            .map(|b| self.amb.mul(s, b))
            .chain(self.rel.basis().cloned())
            .collect();
        self.amb.span(gens)
    }

    /// `s N`.
    pub fn image(&self, s: &[u64]) -> Quotient {
        Quotient {
            amb: self.amb.clone(),
            sub: self.image_lattice(s),
            rel: self.rel.clone(),
        }
    }

    /// `N[s]`.
    pub fn kernel(&self, s: &[u64]) -> Quotient {
        let d = self.amb.dim();
        let mut rows = Vec::new();
        for b in self.generators() {
            let mut row = self.amb.mul(s, b);
            row.extend_from_slice(b);
            rows.push(row);
        }
        for l in self.rel.basis() {
            let mut row = l.clone();
            row.extend(std::iter::repeat_n(0, d));
            rows.push(row);
        }
        let sub = Lattice::split_off_kernel(self.amb.p(), self.amb.exponent(), d, d, rows);
        Quotient {
            amb: self.amb.clone(),
            sub,
            rel: self.rel.clone(),
        }
    }

    /// Same module with the submodule replaced by the span of `gens` and the relations.
    pub fn with_sub(&self, gens: impl IntoIterator<Item = Vec<u64>>) -> Quotient {
        let sub = self.amb.span(gens.into_iter().chain(self.rel.basis().cloned()));
        Quotient {
            amb: self.amb.clone(),
            sub,
            rel: self.rel.clone(),
        }
    }

    /// Length of the image of this module in `target`, a quotient of a coarser ambient.
    pub fn projected_log_size(&self, target: &Quotient) -> u64 {
        let gens: Vec<Vec<u64>> = self
            .generators()
            .map(|b| self.amb.project(&target.amb, b))
            .collect();
        target.with_sub(gens).log_size()
    }
}
