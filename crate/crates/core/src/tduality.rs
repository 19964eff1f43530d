//! Topological T-duality of circle bundles with H-flux.
//!
//! A pair is a circle bundle `π: M → B` with first Chern class `c1 ∈ H²(B)`
//! and a class `H ∈ H³(M)`. The Gysin sequence gives
//!
//! ```text
//! 0 → coker(∪c1: H¹(B) → H³(B)) → H³(M) → ker(∪c1: H²(B) → H⁴(B)) → 0
//! ```
//!
//! where the right map is the fibre integration `π_*`. `H` is stored by its
//! two components: the image `π_* H ∈ H²(B)` and a representative in `H³(B)`
//! of the coker part. The dual pair has `ĉ1 = π_* H` and `π̂_* Ĥ = c1`.
//!
//! Group elements are integer coordinate vectors, torsion coordinates first
//! (as in [`AbelianGroup`]), then free ones.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::cohomology::{snf, AbelianGroup, IntMatrix, Snf};
use crate::error::{Error, Result};

/// Cohomology of a base space in degrees 0..=4 and the cup product with a
/// degree-2 class, as structure constants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasePresentation {
    pub name: String,
    /// `H⁰ … H⁴`; generator lists are not used.
    pub groups: Vec<AbelianGroup>,
    /// `m1[a]`: matrix of `x ↦ x ∪ e_a` from `H¹` to `H³` for the `a`-th
    /// generator `e_a` of `H²`.
    pub m1: Vec<IntMatrix>,
    /// `m2[a]`: matrix of `x ↦ x ∪ e_a` from `H²` to `H⁴`.
    pub m2: Vec<IntMatrix>,
}

fn rank_of(g: &AbelianGroup) -> usize {
    g.torsion.len() + g.free_rank
}

fn group(free_rank: usize, torsion: &[i64]) -> AbelianGroup {
    AbelianGroup {
        free_rank,
        torsion: torsion.iter().map(|&d| BigInt::from(d)).collect(),
        generators: Vec::new(),
    }
}

/// Orders of the coordinates: `d_i` for torsion, 0 for free.
fn orders(g: &AbelianGroup) -> Vec<BigInt> {
    g.torsion.iter().cloned().chain(std::iter::repeat_n(BigInt::zero(), g.free_rank)).collect()
}

fn reduce(g: &AbelianGroup, x: &[BigInt]) -> Vec<BigInt> {
    x.iter()
        .zip(orders(g))
        .map(|(v, d)| if d.is_zero() { v.clone() } else { v.mod_floor(&d) })
        .collect()
}

fn is_zero_in(g: &AbelianGroup, x: &[BigInt]) -> bool {
    reduce(g, x).iter().all(Zero::is_zero)
}

impl BasePresentation {
    /// Validates shapes and that every structure constant is compatible with
    /// the torsion orders of source, target and the `H²` generator.
    pub fn custom(
        name: impl Into<String>,
        groups: Vec<AbelianGroup>,
        m1: Vec<IntMatrix>,
        m2: Vec<IntMatrix>,
    ) -> Result<Self> {
        let name = name.into();
        let bad = |msg: String| Err(Error::MalformedBase(msg));
        if groups.len() != 5 {
            return bad(format!("expected H⁰..H⁴, got {} groups", groups.len()));
        }
        for (k, g) in groups.iter().enumerate() {
            if g.torsion.iter().any(|d| *d < BigInt::from(2)) {
                return bad(format!("torsion orders of H^{k} must be at least 2"));
            }
            if g.torsion.windows(2).any(|w| !w[1].is_multiple_of(&w[0])) {
                return bad(format!("torsion orders of H^{k} must divide each other"));
            }
        }
        let n2 = rank_of(&groups[2]);
        if m1.len() != n2 || m2.len() != n2 {
            return bad(format!("need {n2} structure matrices per map"));
        }
        let base = Self { name, groups, m1, m2 };
        for (maps, src, tgt) in [(&base.m1, 1, 3), (&base.m2, 2, 4)] {
            for (a, m) in maps.iter().enumerate() {
                if m.rows() != rank_of(&base.groups[tgt]) || m.cols() != rank_of(&base.groups[src]) {
                    return bad(format!("structure matrix {a} for H^{src}→H^{tgt} has wrong shape"));
                }
                let ea = &orders(&base.groups[2])[a];
                for (j, dj) in orders(&base.groups[src]).iter().enumerate() {
                    let col = m.column(j);
                    for d in [ea, dj] {
                        if !d.is_zero() {
                            let scaled: Vec<BigInt> = col.iter().map(|x| x * d).collect();
                            if !is_zero_in(&base.groups[tgt], &scaled) {
                                return bad(format!("cup structure {a} is not well defined on torsion"));
                            }
                        }
                    }
                }
            }
        }
        Ok(base)
    }

    /// Closed orientable surface of genus `g`.
    pub fn surface(genus: usize) -> Self {
        let name = if genus == 0 { "S2".to_string() } else { format!("Sigma{genus}") };
        let groups = vec![group(1, &[]), group(2 * genus, &[]), group(1, &[]), group(0, &[]), group(0, &[])];
        let m1 = vec![IntMatrix::zeros(0, 2 * genus)];
        let m2 = vec![IntMatrix::zeros(0, 1)];
        Self { name, groups, m1, m2 }
    }

    pub fn sphere() -> Self {
        Self::surface(0)
    }

    pub fn rp2() -> Self {
        let groups = vec![group(1, &[]), group(0, &[]), group(0, &[2]), group(0, &[]), group(0, &[])];
        Self {
            name: "RP2".into(),
            groups,
            m1: vec![IntMatrix::zeros(0, 0)],
            m2: vec![IntMatrix::zeros(0, 1)],
        }
    }

    /// Built-in base by name: `S2`, `RP2`, `T2` or `Sigma<g>`.
    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "S2" => Ok(Self::sphere()),
            "RP2" => Ok(Self::rp2()),
            "T2" => Ok(Self::surface(1)),
            _ => name
                .strip_prefix("Sigma")
                .and_then(|g| g.parse().ok())
                .map(Self::surface)
                .ok_or_else(|| Error::MalformedBase(format!("unknown base {name:?}"))),
        }
    }

    /// Whether this presentation is one of the built-in ones.
    pub fn is_builtin(&self) -> bool {
        Self::builtin(&self.name).is_ok_and(|b| &b == self)
    }

    fn h(&self, k: usize) -> &AbelianGroup {
        &self.groups[k]
    }

    fn check_element(&self, k: usize, x: &[BigInt], what: &str) -> Result<()> {
        if x.len() != rank_of(self.h(k)) {
            return Err(Error::DimensionMismatch(format!(
                "{what} has {} coordinates, H^{k}({}) has {}",
                x.len(),
                self.name,
                rank_of(self.h(k))
            )));
        }
        Ok(())
    }

    fn cup_matrix(maps: &[IntMatrix], e: &[BigInt], rows: usize, cols: usize) -> IntMatrix {
        let mut out = IntMatrix::zeros(rows, cols);
        for (m, ea) in maps.iter().zip(e) {
            for r in 0..rows {
                for c in 0..cols {
                    let v = out.get(r, c) + m.get(r, c) * ea;
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// `M₁(e): H¹ → H³`.
    pub fn cup1(&self, e: &[BigInt]) -> IntMatrix {
        Self::cup_matrix(&self.m1, e, rank_of(self.h(3)), rank_of(self.h(1)))
    }

    /// `M₂(e): H² → H⁴`.
    pub fn cup2(&self, e: &[BigInt]) -> IntMatrix {
        Self::cup_matrix(&self.m2, e, rank_of(self.h(4)), rank_of(self.h(2)))
    }
}

/// `Z^n / (column span of rel)` with the transform used to reduce elements.
struct Quotient {
    group: AbelianGroup,
    snf: Snf,
}

impl Quotient {
    fn new(n: usize, rel: &IntMatrix) -> Self {
        let s = snf(rel);
        let diag = s.diagonal();
        let mut torsion = Vec::new();
        let mut generators = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if !d.is_one() {
                torsion.push(d.clone());
                generators.push(s.u_inv.column(i));
            }
        }
        for i in s.rank..n {
            generators.push(s.u_inv.column(i));
        }
        Quotient { group: AbelianGroup { free_rank: n - s.rank, torsion, generators }, snf: s }
    }

    fn contains_zero(&self, x: &[BigInt]) -> bool {
        let y = self.snf.u.mul_vec(x);
        let diag = self.snf.diagonal();
        y.iter().enumerate().all(|(i, v)| if i < diag.len() { v.is_multiple_of(&diag[i]) } else { v.is_zero() })
    }
}

fn relations(g: &AbelianGroup) -> IntMatrix {
    let n = rank_of(g);
    let cols: Vec<Vec<BigInt>> = g
        .torsion
        .iter()
        .enumerate()
        .map(|(i, d)| (0..n).map(|r| if r == i { d.clone() } else { BigInt::zero() }).collect())
        .collect();
    IntMatrix::from_columns(n, &cols)
}

fn coker_quotient(m: &IntMatrix, tgt: &AbelianGroup) -> Quotient {
    Quotient::new(rank_of(tgt), &m.hcat(&relations(tgt)))
}

/// Cokernel of a homomorphism given by `m` into `tgt`.
pub fn cokernel(m: &IntMatrix, tgt: &AbelianGroup) -> AbelianGroup {
    coker_quotient(m, tgt).group
}

/// Kernel of a homomorphism `src → tgt` given by `m`; generators are in
/// source coordinates.
pub fn kernel(m: &IntMatrix, src: &AbelianGroup, tgt: &AbelianGroup) -> AbelianGroup {
    let na = rank_of(src);
    let q = m.hcat(&relations(tgt));
    let sq = snf(&q);
    // lattice L ⊂ Z^na of source vectors mapping into the target relations
    let gens: Vec<Vec<BigInt>> = (sq.rank..q.cols()).map(|j| sq.v.column(j)[..na].to_vec()).collect();
    let g = IntMatrix::from_columns(na, &gens);
    let sg = snf(&g);
    let r = sg.rank;
    let diag = sg.diagonal();
    let basis: Vec<Vec<BigInt>> =
        (0..r).map(|i| sg.u_inv.column(i).iter().map(|x| x * &diag[i]).collect()).collect();
    // source relations expressed in the basis of L
    let ra = relations(src);
    let coeff_cols: Vec<Vec<BigInt>> = (0..ra.cols())
        .map(|j| {
            let y = sg.u.mul_vec(&ra.column(j));
            (0..r).map(|i| y[i].div_floor(&diag[i])).collect()
        })
        .collect();
    let coeff = IntMatrix::from_columns(r, &coeff_cols);
    let quo = Quotient::new(r, &coeff);
    let generators = quo
        .group
        .generators
        .iter()
        .map(|c| {
            let mut v = vec![BigInt::zero(); na];
            for (ci, b) in c.iter().zip(&basis) {
                for (vk, bk) in v.iter_mut().zip(b) {
                    *vk += ci * bk;
                }
            }
            reduce(src, &v)
        })
        .collect();
    AbelianGroup { generators, ..quo.group }
}

/// Rank over the rationals of the free-to-free block of `m`.
fn rational_rank(m: &IntMatrix, src: &AbelianGroup, tgt: &AbelianGroup) -> usize {
    let (ts, tt) = (src.torsion.len(), tgt.torsion.len());
    let block = IntMatrix::from_fn(tgt.free_rank, src.free_rank, |r, c| m.get(tt + r, ts + c).clone());
    snf(&block).rank
}

/// Extension data of `H³` of the total space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GysinPresentation {
    /// `coker(M₁(c1))`, the image of `π^*: H³(B) → H³(M)`.
    pub coker: AbelianGroup,
    /// `ker(M₂(c1))`, the image of `π_*: H³(M) → H²(B)`.
    pub ker: AbelianGroup,
    /// `H³(M)` when the extension is determined (coker trivial or ker free).
    pub h3: Option<AbelianGroup>,
}

fn direct_sum(a: &AbelianGroup, b: &AbelianGroup) -> AbelianGroup {
    let torsion: Vec<BigInt> = a.torsion.iter().chain(&b.torsion).cloned().collect();
    let n = torsion.len();
    let diag = IntMatrix::from_fn(n, n, |r, c| if r == c { torsion[r].clone() } else { BigInt::zero() });
    let invariant: Vec<BigInt> = snf(&diag).diagonal().into_iter().filter(|d| !d.is_one()).collect();
    AbelianGroup { free_rank: a.free_rank + b.free_rank, torsion: invariant, generators: Vec::new() }
}

pub fn gysin_h3(base: &BasePresentation, c1: &[BigInt]) -> Result<GysinPresentation> {
    base.check_element(2, c1, "c1")?;
    let m1 = base.cup1(c1);
    let m2 = base.cup2(c1);
    let coker = cokernel(&m1, base.h(3));
    let ker = kernel(&m2, base.h(2), base.h(4));
    if ker.free_rank + rational_rank(&m2, base.h(2), base.h(4)) != base.h(2).free_rank {
        return Err(Error::Inconsistent("rank of ker(∪c1) does not match H²".into()));
    }
    let h3 = if coker.is_trivial() {
        Some(AbelianGroup { generators: Vec::new(), ..ker.clone() })
    } else if ker.torsion.is_empty() {
        Some(direct_sum(&coker, &ker))
    } else {
        None
    };
    Ok(GysinPresentation { coker, ker, h3 })
}

/// `H ∈ H³(M)` by its Gysin components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HClass {
    /// `π_* H ∈ ker(M₂(c1)) ⊂ H²(B)`, in `H²(B)` coordinates.
    pub ker: Vec<BigInt>,
    /// Representative in `H³(B)` coordinates of the coker component.
    pub coker: Vec<BigInt>,
}

impl HClass {
    pub fn zero(base: &BasePresentation) -> Self {
        Self { ker: vec![BigInt::zero(); rank_of(base.h(2))], coker: vec![BigInt::zero(); rank_of(base.h(3))] }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TDualPair {
    pub base: BasePresentation,
    pub c1: Vec<BigInt>,
    pub h: HClass,
}

impl TDualPair {
    /// Validates coordinates and that `π_* H` lies in `ker(M₂(c1))`. Torsion
    /// coordinates are reduced into `[0, d)`.
    pub fn new(base: BasePresentation, c1: Vec<BigInt>, h: HClass) -> Result<Self> {
        base.check_element(2, &c1, "c1")?;
        base.check_element(2, &h.ker, "ker component of H")?;
        base.check_element(3, &h.coker, "coker component of H")?;
        let image = base.cup2(&c1).mul_vec(&h.ker);
        if !is_zero_in(base.h(4), &image) {
            return Err(Error::InvalidInput("ker component of H is not in ker(∪c1)".into()));
        }
        let c1 = reduce(base.h(2), &c1);
        let h = HClass { ker: reduce(base.h(2), &h.ker), coker: reduce(base.h(3), &h.coker) };
        Ok(Self { base, c1, h })
    }

    /// Pair over `S²` with Chern number `c1` and `H = h·generator`.
    pub fn sphere(c1: i64, h: i64) -> Self {
        let base = BasePresentation::sphere();
        Self::new(base, vec![c1.into()], HClass { ker: vec![h.into()], coker: Vec::new() })
            .expect("every pair over S2 is valid")
    }

    pub fn total_space(&self) -> String {
        name_total_space(&self.base, &self.c1)
    }
}

/// `π_* H ∈ H²(B)`.
pub fn pushforward(pair: &TDualPair) -> Vec<BigInt> {
    pair.h.ker.clone()
}

/// Result of [`tdualize`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dual {
    pub pair: TDualPair,
    /// Set when `coker(M₁(ĉ1))` is nontrivial, so `Ĥ` is one of several
    /// lifts (the one with zero coker component).
    pub ambiguous_lift: bool,
}

/// `ĉ1 = π_* H`, `Ĥ` the lift of `c1` with zero coker component.
pub fn tdualize(pair: &TDualPair) -> Result<Dual> {
    let c1_hat = pushforward(pair);
    let base = &pair.base;
    if !is_zero_in(base.h(4), &base.cup2(&c1_hat).mul_vec(&pair.c1)) {
        return Err(Error::Inconsistent("c1 ∪ π_*H ≠ 0; no dual pair with this base".into()));
    }
    let ambiguous_lift = !cokernel(&base.cup1(&c1_hat), base.h(3)).is_trivial();
    let h = HClass { ker: pair.c1.clone(), coker: vec![BigInt::zero(); rank_of(base.h(3))] };
    Ok(Dual { pair: TDualPair::new(base.clone(), c1_hat, h)?, ambiguous_lift })
}

/// `S²×S¹`, `S³`, `L(n;1)` over `S²`; a generic label otherwise.
pub fn name_total_space(base: &BasePresentation, c1: &[BigInt]) -> String {
    if base.name == "S2" && base.is_builtin() && c1.len() == 1 {
        let n = c1[0].abs();
        return if n.is_zero() {
            "S²×S¹".into()
        } else if n.is_one() {
            "S³".into()
        } else {
            format!("L({n};1)")
        };
    }
    let coords: Vec<String> = c1.iter().map(ToString::to_string).collect();
    format!("total space over {} with c1=[{}]", base.name, coords.join(","))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub same_base: bool,
    /// `c1(b) = π_* H(a)`.
    pub forward: bool,
    /// `c1(a) = π̂_* H(b)`.
    pub backward: bool,
    /// Agreement of the coker components modulo both images of `∪c1`;
    /// `None` unless both coker groups are nontrivial.
    pub coker_agree: Option<bool>,
}

impl DualityReport {
    pub fn holds(&self) -> bool {
        self.same_base && self.forward && self.backward && self.coker_agree != Some(false)
    }
}

pub fn verify_duality(a: &TDualPair, b: &TDualPair) -> DualityReport {
    let same_base = a.base == b.base;
    if !same_base {
        return DualityReport { same_base, forward: false, backward: false, coker_agree: None };
    }
    let h2 = a.base.h(2);
    let eq2 = |x: &[BigInt], y: &[BigInt]| {
        let d: Vec<BigInt> = x.iter().zip(y).map(|(p, q)| p - q).collect();
        is_zero_in(h2, &d)
    };
    let forward = eq2(&b.c1, &pushforward(a));
    let backward = eq2(&a.c1, &pushforward(b));
    let h3 = a.base.h(3);
    let (ma, mb) = (a.base.cup1(&a.c1), a.base.cup1(&b.c1));
    let coker_agree = if cokernel(&ma, h3).is_trivial() || cokernel(&mb, h3).is_trivial() {
        None
    } else {
        let q = coker_quotient(&ma.hcat(&mb), h3);
        let d: Vec<BigInt> = a.h.coker.iter().zip(&b.h.coker).map(|(p, q)| p - q).collect();
        Some(q.contains_zero(&d))
    };
    DualityReport { same_base, forward, backward, coker_agree }
}
