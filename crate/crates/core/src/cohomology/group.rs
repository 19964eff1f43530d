//! Cochains, cohomology groups with explicit generators, classification of
//! cocycles and the mod-2 Bockstein.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::cohomology::complex::{FundamentalCycle, Simplex, SimplicialComplex};
use crate::cohomology::matrix::{snf, IntMatrix};
use crate::cohomology::modp::{self, ModMatrix};
use crate::error::{Error, Result};

/// Coefficient ring of a cochain or cohomology group.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Integers,
    /// Integers modulo a prime.
    ModP(u64),
    Reals,
}

impl Ring {
    fn validate(self) -> Result<()> {
        match self {
            Ring::ModP(p) if !modp::is_prime(p) => {
                Err(Error::InvalidInput(format!("modulus {p} is not prime")))
            }
            _ => Ok(()),
        }
    }

    fn reduce(self, x: BigInt) -> BigInt {
        match self {
            Ring::ModP(p) => x.mod_floor(&BigInt::from(p)),
            _ => x,
        }
    }
}

/// Integer or mod-p cochain, one value per `level`-simplex in the complex's
/// order. Real-valued cochains are [`crate::cohomology::RealCochain`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain {
    pub level: usize,
    pub ring: Ring,
    pub values: Vec<BigInt>,
}

impl Cochain {
    pub fn new(k: &SimplicialComplex, level: usize, ring: Ring, values: Vec<BigInt>) -> Result<Self> {
        ring.validate()?;
        if ring == Ring::Reals {
            return Err(Error::InvalidInput("real cochains are stored as RealCochain".into()));
        }
        if values.len() != k.count(level) {
            return Err(Error::DimensionMismatch(format!(
                "{} values for {} simplices of dimension {level}",
                values.len(),
                k.count(level)
            )));
        }
        let values = values.into_iter().map(|x| ring.reduce(x)).collect();
        Ok(Self { level, ring, values })
    }

    pub fn zero(k: &SimplicialComplex, level: usize, ring: Ring) -> Self {
        Self { level, ring, values: vec![BigInt::zero(); k.count(level)] }
    }

    pub fn from_i64(k: &SimplicialComplex, level: usize, ring: Ring, values: &[i64]) -> Result<Self> {
        Self::new(k, level, ring, values.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// Cochain from values keyed by simplex; unlisted simplices get 0.
    pub fn from_map(
        k: &SimplicialComplex,
        level: usize,
        ring: Ring,
        map: &HashMap<Simplex, BigInt>,
    ) -> Result<Self> {
        let mut values = vec![BigInt::zero(); k.count(level)];
        for (s, v) in map {
            if s.len() != level + 1 {
                return Err(Error::DimensionMismatch(format!("simplex {s:?} is not of level {level}")));
            }
            let i = k
                .index_of(s)
                .ok_or_else(|| Error::InvalidInput(format!("simplex {s:?} not in complex")))?;
            values[i] = v.clone();
        }
        Self::new(k, level, ring, values)
    }

    pub fn coboundary(&self, k: &SimplicialComplex) -> Cochain {
        let d = k.coboundary_unchecked(self.level);
        let values = d.mul_vec(&self.values).into_iter().map(|x| self.ring.reduce(x)).collect();
        Cochain { level: self.level + 1, ring: self.ring, values }
    }

    pub fn is_cocycle(&self, k: &SimplicialComplex) -> bool {
        self.coboundary(k).values.iter().all(Zero::is_zero)
    }

    pub fn scaled(&self, factor: i64) -> Cochain {
        let f = BigInt::from(factor);
        let values = self.values.iter().map(|x| self.ring.reduce(x * &f)).collect();
        Cochain { level: self.level, ring: self.ring, values }
    }

    pub fn add(&self, other: &Cochain) -> Cochain {
        assert_eq!((self.level, self.ring), (other.level, other.ring));
        let values = self.values.iter().zip(&other.values).map(|(a, b)| self.ring.reduce(a + b)).collect();
        Cochain { level: self.level, ring: self.ring, values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

/// Finitely generated abelian group `Z^r ⊕ Z/d₁ ⊕ … ⊕ Z/d_t` with `d₁ | d₂ | …`.
///
/// `generators` lists torsion generators first (in the order of `torsion`),
/// then the free generators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub generators: Vec<Vec<BigInt>>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self { free_rank: 0, torsion: Vec::new(), generators: Vec::new() }
    }

    pub fn free(rank: usize) -> Self {
        Self { free_rank: rank, torsion: Vec::new(), generators: Vec::new() }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// Torsion factors as `u64` (for display and tests).
    pub fn torsion_u64(&self) -> Vec<u64> {
        self.torsion.iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect()
    }

    /// Human-readable form such as `Z^2 + Z/2`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Coordinates of a class in a computed generator basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCoords {
    pub free: Vec<BigInt>,
    /// Residues in `[0, d_i)`, one per torsion factor.
    pub torsion: Vec<BigInt>,
}

impl ClassCoords {
    pub fn is_zero(&self) -> bool {
        self.free.iter().chain(&self.torsion).all(Zero::is_zero)
    }
}

#[derive(Clone, Debug)]
enum Classifier {
    Integral {
        /// rank of `δ_k`
        rank: usize,
        v_inv: IntMatrix,
        u_prime: IntMatrix,
        /// invariant factors of `δ_{k−1}` in kernel coordinates
        factors: Vec<BigInt>,
    },
    Field {
        p: u64,
        image: Vec<Vec<u64>>,
        generators: Vec<Vec<u64>>,
    },
}

/// `H^k(K; ring)` together with what is needed to classify cocycles.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub degree: usize,
    pub ring: Ring,
    pub group: AbelianGroup,
    classifier: Classifier,
}

/// Computes `H^k(K; ring) = ker δ_k / im δ_{k−1}` via Smith normal form
/// (integers, reals) or elimination over `Z/p`.
pub fn cohomology(k: &SimplicialComplex, degree: usize, ring: Ring) -> Result<Cohomology> {
    ring.validate()?;
    if degree > k.dim() {
        return Err(Error::OutOfRange(format!("degree {degree} above dimension {}", k.dim())));
    }
    match ring {
        Ring::ModP(p) => cohomology_mod_p(k, degree, p),
        Ring::Integers | Ring::Reals => {
            let mut c = cohomology_integral(k, degree);
            if ring == Ring::Reals {
                let t = c.group.torsion.len();
                c.group.generators.drain(..t);
                c.group.torsion.clear();
                c.ring = Ring::Reals;
            }
            Ok(c)
        }
    }
}

pub fn cohomology_group(k: &SimplicialComplex, degree: usize, ring: Ring) -> Result<AbelianGroup> {
    Ok(cohomology(k, degree, ring)?.group)
}

fn previous_coboundary(k: &SimplicialComplex, degree: usize) -> IntMatrix {
    if degree == 0 {
        IntMatrix::zeros(k.count(0), 0)
    } else {
        k.coboundary_unchecked(degree - 1)
    }
}

fn cohomology_integral(k: &SimplicialComplex, degree: usize) -> Cohomology {
    let b = k.coboundary_unchecked(degree);
    let a = previous_coboundary(k, degree);
    let fb = snf(&b);
    let rank = fb.rank;
    // kernel of δ_k: columns rank.. of V
    let z = fb.v.cols_from(rank);
    let a_ker = fb.v_inv.mul(&a).rows_from(rank);
    let fa = snf(&a_ker);
    let factors = fa.diagonal();
    let gens = z.mul(&fa.u_inv);
    let mut torsion = Vec::new();
    let mut torsion_gens = Vec::new();
    for (i, d) in factors.iter().enumerate() {
        if !d.is_one() {
            torsion.push(d.clone());
            torsion_gens.push(gens.column(i));
        }
    }
    let free_gens: Vec<Vec<BigInt>> = (factors.len()..gens.cols()).map(|i| gens.column(i)).collect();
    let free_rank = free_gens.len();
    torsion_gens.extend(free_gens);
    Cohomology {
        degree,
        ring: Ring::Integers,
        group: AbelianGroup { free_rank, torsion, generators: torsion_gens },
        classifier: Classifier::Integral { rank, v_inv: fb.v_inv, u_prime: fa.u, factors },
    }
}

fn to_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("reduced residue")
}

fn cohomology_mod_p(k: &SimplicialComplex, degree: usize, p: u64) -> Result<Cohomology> {
    let b = k.coboundary_unchecked(degree);
    let a = previous_coboundary(k, degree);
    let bm = ModMatrix::from_fn(b.rows(), b.cols(), p, |r, c| to_mod(b.get(r, c), p));
    let kernel = bm.null_space();
    let n = k.count(degree);
    let a_cols: Vec<Vec<u64>> = (0..a.cols()).map(|c| a.column(c).iter().map(|x| to_mod(x, p)).collect()).collect();
    let image_idx = modp::independent_columns(&a_cols, n, p);
    let image: Vec<Vec<u64>> = image_idx.iter().map(|&i| a_cols[i].clone()).collect();
    let mut combined = image.clone();
    combined.extend(kernel.iter().cloned());
    let picked = modp::independent_columns(&combined, n, p);
    let generators: Vec<Vec<u64>> =
        picked.iter().filter(|&&i| i >= image.len()).map(|&i| combined[i].clone()).collect();
    let group = AbelianGroup {
        free_rank: 0,
        torsion: vec![BigInt::from(p); generators.len()],
        generators: generators.iter().map(|g| g.iter().map(|&x| BigInt::from(x)).collect()).collect(),
    };
    Ok(Cohomology { degree, ring: Ring::ModP(p), group, classifier: Classifier::Field { p, image, generators } })
}

impl Cohomology {
    /// Coordinates of `[c]`; zero iff `c` is a coboundary.
    pub fn classify(&self, k: &SimplicialComplex, c: &Cochain) -> Result<ClassCoords> {
        if c.level != self.degree {
            return Err(Error::DimensionMismatch(format!(
                "cochain of level {} classified in degree {}",
                c.level, self.degree
            )));
        }
        if c.values.len() != k.count(self.degree) {
            return Err(Error::DimensionMismatch("cochain does not match complex".into()));
        }
        match &self.classifier {
            Classifier::Integral { rank, v_inv, u_prime, factors } => {
                if c.ring != Ring::Integers {
                    return Err(Error::InvalidInput("integral classification needs an integer cochain".into()));
                }
                if !c.is_cocycle(k) {
                    return Err(Error::NotCocycle);
                }
                let x: Vec<BigInt> = v_inv.mul_vec(&c.values).split_off(*rank);
                let y = u_prime.mul_vec(&x);
                let mut torsion = Vec::new();
                for (i, d) in factors.iter().enumerate() {
                    if !d.is_one() {
                        torsion.push(y[i].mod_floor(d));
                    }
                }
                let free: Vec<BigInt> = y[factors.len()..].to_vec();
                if self.ring == Ring::Reals {
                    return Ok(ClassCoords { free, torsion: Vec::new() });
                }
                Ok(ClassCoords { free, torsion })
            }
            Classifier::Field { p, image, generators } => {
                if c.ring != Ring::ModP(*p) {
                    return Err(Error::InvalidInput(format!("cochain ring {:?} is not Z/{p}", c.ring)));
                }
                if !c.is_cocycle(k) {
                    return Err(Error::NotCocycle);
                }
                let b: Vec<u64> = c.values.iter().map(|x| to_mod(x, *p)).collect();
                let mut cols = image.clone();
                cols.extend(generators.iter().cloned());
                let y = modp::solve_columns(&cols, &b, *p)
                    .ok_or_else(|| Error::Inconsistent("cocycle outside kernel span".into()))?;
                let torsion = y[image.len()..].iter().map(|&v| BigInt::from(v)).collect();
                Ok(ClassCoords { free: Vec::new(), torsion })
            }
        }
    }

    /// Generator `i` (torsion first, then free) as a cochain.
    pub fn generator(&self, i: usize) -> Cochain {
        let ring = if self.ring == Ring::Reals { Ring::Integers } else { self.ring };
        Cochain { level: self.degree, ring, values: self.group.generators[i].clone() }
    }
}

/// Convenience wrapper computing the group first.
pub fn classify(k: &SimplicialComplex, degree: usize, c: &Cochain) -> Result<ClassCoords> {
    cohomology(k, degree, c.ring)?.classify(k, c)
}

/// Pairing of a top-level cochain with a fundamental cycle.
pub fn evaluate(c: &Cochain, cycle: &FundamentalCycle) -> Result<BigInt> {
    if c.level != cycle.dim || c.values.len() != cycle.signs.len() {
        return Err(Error::DimensionMismatch("cochain level differs from cycle dimension".into()));
    }
    let s: BigInt = c.values.iter().zip(&cycle.signs).map(|(v, &s)| v * BigInt::from(s)).sum();
    Ok(c.ring.reduce(s))
}

/// Output of the mod-2 Bockstein.
#[derive(Clone, Debug)]
pub struct BocksteinClass {
    /// `δz̃ / 2` for the chosen integer lift `z̃`.
    pub cocycle: Cochain,
    pub class: ClassCoords,
    pub group: AbelianGroup,
}

/// `β(z) = [δz̃ / 2] ∈ H^{k+1}(K; Z)` with `z̃` the lift of `z` with entries in
/// `{0, 1}`.
pub fn bockstein_z2(k: &SimplicialComplex, z: &Cochain) -> Result<BocksteinClass> {
    let lift = Cochain { level: z.level, ring: Ring::Integers, values: z.values.clone() };
    bockstein_z2_with_lift(k, z, &lift)
}

/// Bockstein computed from an arbitrary integer lift of `z`.
pub fn bockstein_z2_with_lift(k: &SimplicialComplex, z: &Cochain, lift: &Cochain) -> Result<BocksteinClass> {
    if z.ring != Ring::ModP(2) {
        return Err(Error::InvalidInput("Bockstein input must be a mod-2 cochain".into()));
    }
    if lift.ring != Ring::Integers || lift.level != z.level || lift.values.len() != z.values.len() {
        return Err(Error::InvalidInput("lift must be an integer cochain of the same level".into()));
    }
    let two = BigInt::from(2);
    if lift.values.iter().zip(&z.values).any(|(l, v)| !(l - v).mod_floor(&two).is_zero()) {
        return Err(Error::InvalidInput("lift does not reduce to the given cochain".into()));
    }
    if z.level >= k.dim() {
        return Err(Error::OutOfRange(format!("no degree {} in complex of dimension {}", z.level + 1, k.dim())));
    }
    if !z.is_cocycle(k) {
        return Err(Error::NotCocycle);
    }
    let dl = lift.coboundary(k);
    let mut values = Vec::with_capacity(dl.values.len());
    for v in dl.values {
        let (q, r) = v.div_mod_floor(&two);
        if !r.is_zero() {
            return Err(Error::Inconsistent("coboundary of lift is not even".into()));
        }
        values.push(q);
    }
    let cocycle = Cochain { level: z.level + 1, ring: Ring::Integers, values };
    let h = cohomology(k, z.level + 1, Ring::Integers)?;
    let class = h.classify(k, &cocycle)?;
    Ok(BocksteinClass { cocycle, class, group: h.group })
}

/// A mod-2 cocycle of degree `level` whose Bockstein is nonzero, taken from
/// the computed basis of `H^level(K; Z/2)`; `None` if the Bockstein vanishes
/// on every basis element.
pub fn nontrivial_bockstein_source(k: &SimplicialComplex, level: usize) -> Result<Option<Cochain>> {
    let h = cohomology(k, level, Ring::ModP(2))?;
    for i in 0..h.group.generators.len() {
        let z = h.generator(i);
        if !bockstein_z2(k, &z)?.class.is_zero() {
            return Ok(Some(z));
        }
    }
    Ok(None)
}
