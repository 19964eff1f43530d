//! Ordered simplicial complexes of dimension at most four.
//!
//! Simplices are stored as strictly increasing vertex tuples. The orientation
//! of a simplex is the one given by its vertex order, and the `i`-th face
//! (vertex `i` omitted) enters the boundary with sign `(−1)^i`. The same
//! convention is used for every coboundary in the crate.

use std::collections::{BTreeSet, HashMap, VecDeque};

use num_bigint::BigInt;

use crate::cohomology::matrix::IntMatrix;
use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

pub type Simplex = Vec<usize>;

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    n_vertices: usize,
    /// `simplices[k]`: sorted list of `k`-simplices.
    simplices: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.n_vertices == other.n_vertices && self.simplices == other.simplices
    }
}

/// Faces obtained by omitting one vertex, in order of the omitted position.
pub fn faces(s: &[usize]) -> impl Iterator<Item = Simplex> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        f
    })
}

impl SimplicialComplex {
    /// Builds a complex from an explicit list of simplices of positive
    /// dimension; vertices `0..n_vertices` are implicit. Every face of every
    /// listed simplex must be listed too.
    pub fn from_simplices(n_vertices: usize, simplices: Vec<Simplex>) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); MAX_DIM + 1];
        for v in 0..n_vertices {
            by_dim[0].insert(vec![v]);
        }
        for s in simplices {
            Self::validate_simplex(n_vertices, &s)?;
            let k = s.len() - 1;
            if k > 0 && !by_dim[k].insert(s.clone()) {
                return Err(Error::InvalidInput(format!("duplicate simplex {s:?}")));
            }
        }
        for k in 1..=MAX_DIM {
            for s in &by_dim[k] {
                for f in faces(s) {
                    if !by_dim[k - 1].contains(&f) {
                        return Err(Error::InvalidInput(format!("face {f:?} of {s:?} missing")));
                    }
                }
            }
        }
        Ok(Self::from_sets(n_vertices, by_dim))
    }

    /// Builds the closure under faces of the given simplices.
    pub fn from_maximal(n_vertices: usize, simplices: &[Simplex]) -> Result<Self> {
        let mut by_dim: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); MAX_DIM + 1];
        for v in 0..n_vertices {
            by_dim[0].insert(vec![v]);
        }
        for s in simplices {
            Self::validate_simplex(n_vertices, s)?;
            by_dim[s.len() - 1].insert(s.clone());
        }
        for k in (1..=MAX_DIM).rev() {
            let current: Vec<Simplex> = by_dim[k].iter().cloned().collect();
            for s in current {
                for f in faces(&s) {
                    by_dim[k - 1].insert(f);
                }
            }
        }
        Ok(Self::from_sets(n_vertices, by_dim))
    }

    fn validate_simplex(n_vertices: usize, s: &[usize]) -> Result<()> {
        if s.is_empty() || s.len() > MAX_DIM + 1 {
            return Err(Error::InvalidInput(format!("simplex {s:?} has unsupported size")));
        }
        if s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(format!("simplex {s:?} is not strictly increasing")));
        }
        if s.iter().any(|&v| v >= n_vertices) {
            return Err(Error::InvalidInput(format!("simplex {s:?} uses unknown vertex")));
        }
        Ok(())
    }

    fn from_sets(n_vertices: usize, by_dim: Vec<BTreeSet<Simplex>>) -> Self {
        let simplices: Vec<Vec<Simplex>> = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        let index = simplices
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        Self { n_vertices, simplices, index }
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Highest dimension with at least one simplex (0 for a non-empty set of
    /// points).
    pub fn dim(&self) -> usize {
        (0..=MAX_DIM).rev().find(|&k| !self.simplices[k].is_empty()).unwrap_or(0)
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.simplices.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        self.index.get(s.len().checked_sub(1)?)?.get(s).copied()
    }

    pub fn euler_characteristic(&self) -> i64 {
        (0..=MAX_DIM).map(|k| if k % 2 == 0 { 1 } else { -1 } * self.count(k) as i64).sum()
    }

    /// Matrix of `δ: C^k → C^{k+1}` (rows: `(k+1)`-simplices). Defined for
    /// every `k ≤ dim`; at `k = dim` it has no rows.
    pub(crate) fn coboundary_unchecked(&self, k: usize) -> IntMatrix {
        let rows = self.count(k + 1);
        let cols = self.count(k);
        let mut m = IntMatrix::zeros(rows, cols);
        for (r, s) in self.simplices(k + 1).iter().enumerate() {
            for (i, f) in faces(s).enumerate() {
                let c = self.index[k][&f];
                m.set(r, c, BigInt::from(if i % 2 == 0 { 1 } else { -1 }));
            }
        }
        m
    }

    /// Coboundary matrix of `δ: C^k → C^{k+1}` for `0 ≤ k < dim`.
    pub fn coboundary_matrix(&self, k: usize) -> Result<IntMatrix> {
        if k >= self.dim() {
            return Err(Error::OutOfRange(format!("degree {k} for complex of dimension {}", self.dim())));
        }
        Ok(self.coboundary_unchecked(k))
    }

    /// Orients the top simplices coherently. Every `(n−1)`-simplex must lie in
    /// exactly two top simplices.
    pub fn fundamental_cycle(&self) -> Result<FundamentalCycle> {
        let n = self.dim();
        if n == 0 {
            return Err(Error::NotClosedManifold("zero-dimensional complex".into()));
        }
        let tops = self.simplices(n);
        let mut incident: HashMap<&[usize], Vec<(usize, usize)>> = HashMap::new();
        let face_lists: Vec<Vec<Simplex>> = tops.iter().map(|s| faces(s).collect()).collect();
        for (t, fs) in face_lists.iter().enumerate() {
            for (i, f) in fs.iter().enumerate() {
                incident.entry(f.as_slice()).or_default().push((t, i));
            }
        }
        if incident.len() != self.count(n - 1) {
            return Err(Error::NotClosedManifold("free (n−1)-simplex outside every top simplex".into()));
        }
        for (f, inc) in &incident {
            if inc.len() != 2 {
                return Err(Error::NotClosedManifold(format!(
                    "face {:?} lies in {} top simplices",
                    f,
                    inc.len()
                )));
            }
        }
        let mut signs = vec![0i8; tops.len()];
        for start in 0..tops.len() {
            if signs[start] != 0 {
                continue;
            }
            signs[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                for (i, f) in face_lists[t].iter().enumerate() {
                    let inc = &incident[f.as_slice()];
                    let &(other, j) = inc.iter().find(|&&(o, _)| o != t).expect("two incident tops");
                    // induced orientations on the shared face must cancel
                    let own = signs[t] as i32 * if i % 2 == 0 { 1 } else { -1 };
                    let needed = (-own * if j % 2 == 0 { 1 } else { -1 }) as i8;
                    if signs[other] == 0 {
                        signs[other] = needed;
                        queue.push_back(other);
                    } else if signs[other] != needed {
                        return Err(Error::NonOrientable);
                    }
                }
            }
        }
        Ok(FundamentalCycle { dim: n, signs })
    }

    /// The complex with vertex `v` renamed `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        let mut all = Vec::new();
        for k in 1..=MAX_DIM {
            for s in self.simplices(k) {
                let mut t: Vec<usize> = s.iter().map(|&v| perm[v]).collect();
                t.sort_unstable();
                all.push(t);
            }
        }
        Self::from_simplices(self.n_vertices, all)
    }

    /// A single vertex.
    pub fn point() -> Self {
        Self::from_maximal(1, &[]).expect("valid")
    }

    /// Boundary of the triangle, three vertices.
    pub fn circle() -> Self {
        Self::sphere(1)
    }

    /// Boundary of the `(n+1)`-simplex, a triangulated `n`-sphere, `1 ≤ n ≤ 3`.
    pub fn sphere(n: usize) -> Self {
        assert!((1..=3).contains(&n), "sphere dimension 1..=3");
        let full: Vec<usize> = (0..n + 2).collect();
        let tops: Vec<Simplex> = faces(&full).collect();
        Self::from_maximal(n + 2, &tops).expect("valid")
    }

    /// Six-vertex real projective plane.
    pub fn rp2() -> Self {
        let tris = [
            [0, 1, 2],
            [0, 2, 3],
            [0, 3, 4],
            [0, 4, 5],
            [0, 1, 5],
            [1, 2, 4],
            [2, 3, 5],
            [1, 3, 4],
            [2, 4, 5],
            [1, 3, 5],
        ];
        let tops: Vec<Simplex> = tris.iter().map(|t| t.to_vec()).collect();
        Self::from_maximal(6, &tops).expect("valid")
    }

    pub fn torus() -> Self {
        product_complex(&Self::circle(), &Self::circle()).expect("dimension 2")
    }

    /// Product of ordered complexes with the staircase triangulation; vertex
    /// `(a, b)` becomes `a · n_L + b`.
    pub fn product(&self, other: &Self) -> Result<Self> {
        product_complex(self, other)
    }
}

/// Staircase triangulation of `K × L`.
pub fn product_complex(k: &SimplicialComplex, l: &SimplicialComplex) -> Result<SimplicialComplex> {
    if k.dim() + l.dim() > MAX_DIM {
        return Err(Error::OutOfRange(format!(
            "product dimension {} exceeds {MAX_DIM}",
            k.dim() + l.dim()
        )));
    }
    let nl = l.n_vertices();
    let mut tops = BTreeSet::new();
    for p in 0..=k.dim() {
        for sigma in k.simplices(p) {
            for q in 0..=l.dim() {
                for tau in l.simplices(q) {
                    for path in staircase_paths(p, q) {
                        let (mut i, mut j) = (0, 0);
                        let mut simplex = vec![sigma[0] * nl + tau[0]];
                        for step_in_k in path {
                            if step_in_k {
                                i += 1;
                            } else {
                                j += 1;
                            }
                            simplex.push(sigma[i] * nl + tau[j]);
                        }
                        tops.insert(simplex);
                    }
                }
            }
        }
    }
    let tops: Vec<Simplex> = tops.into_iter().collect();
    SimplicialComplex::from_maximal(k.n_vertices() * nl, &tops)
}

/// Monotone lattice paths with `p` steps in the first factor and `q` in the
/// second (`true` = first factor).
fn staircase_paths(p: usize, q: usize) -> Vec<Vec<bool>> {
    if p == 0 && q == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    if p > 0 {
        for mut rest in staircase_paths(p - 1, q) {
            rest.insert(0, true);
            out.push(rest);
        }
    }
    if q > 0 {
        for mut rest in staircase_paths(p, q - 1) {
            rest.insert(0, false);
            out.push(rest);
        }
    }
    out
}

/// Coherent orientation of the top simplices of a closed pseudomanifold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalCycle {
    pub dim: usize,
    /// `±1` per top simplex, in the complex's order.
    pub signs: Vec<i8>,
}

impl FundamentalCycle {
    pub fn reversed(&self) -> Self {
        Self { dim: self.dim, signs: self.signs.iter().map(|s| -s).collect() }
    }
}
