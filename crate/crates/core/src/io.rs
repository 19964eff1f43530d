//! JSON file formats. Complex numbers are `[re, im]` pairs, matrices are
//! lists of rows, simplices and cochain entries are keyed by comma-separated
//! vertex lists such as `"0,1,2"`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::berry::{PhaseData, TensorFamily};
use crate::channel::MpsTensor;
use crate::cohomology::{product_complex, AbelianGroup, Cochain, IntMatrix, Ring, SimplicialComplex};
use crate::error::{Error, Result};
use crate::rg::FixedPointData;
use crate::scalar::{CMat, C};
use crate::tduality::{BasePresentation, HClass, TDualPair};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMat<f64>) -> MatrixJson {
    (0..m.nrows()).map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMat<f64>> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(invalid("ragged matrix"));
    }
    Ok(DMatrix::from_fn(n, m, |r, c| C::new(rows[r][c][0], rows[r][c][1])))
}

#[derive(Serialize, Deserialize)]
pub struct TensorJson {
    pub phys_dim: usize,
    pub bond_dim: usize,
    pub kraus: Vec<MatrixJson>,
}

impl TensorJson {
    pub fn from_tensor(t: &MpsTensor<f64>) -> Self {
        Self { phys_dim: t.phys_dim(), bond_dim: t.bond_dim(), kraus: t.kraus().iter().map(matrix_to_json).collect() }
    }

    pub fn to_tensor(&self) -> Result<MpsTensor<f64>> {
        if self.kraus.len() != self.phys_dim {
            return Err(Error::DimensionMismatch(format!(
                "phys_dim {} but {} Kraus operators",
                self.phys_dim,
                self.kraus.len()
            )));
        }
        let kraus = self.kraus.iter().map(matrix_from_json).collect::<Result<Vec<_>>>()?;
        if kraus.iter().any(|k| k.nrows() != self.bond_dim || k.ncols() != self.bond_dim) {
            return Err(Error::DimensionMismatch(format!("Kraus operators are not {0}×{0}", self.bond_dim)));
        }
        MpsTensor::new(kraus)
    }
}

pub fn tensor_to_json(t: &MpsTensor<f64>) -> Value {
    serde_json::to_value(TensorJson::from_tensor(t)).expect("serializable")
}

pub fn tensor_from_json(v: &Value) -> Result<MpsTensor<f64>> {
    TensorJson::deserialize(v)?.to_tensor()
}

#[derive(Serialize, Deserialize)]
pub struct FixedPointJson {
    pub rho: MatrixJson,
    pub phys_dim: usize,
    pub iterations: usize,
    pub residual: f64,
    pub tensor: TensorJson,
}

pub fn fixed_point_to_json(f: &FixedPointData<f64>) -> Value {
    let j = FixedPointJson {
        rho: matrix_to_json(f.rho.matrix()),
        phys_dim: f.phys_dim,
        iterations: f.iterations,
        residual: f.residual,
        tensor: TensorJson::from_tensor(&f.tensor),
    };
    serde_json::to_value(j).expect("serializable")
}

pub fn key(s: &[usize]) -> String {
    s.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
}

pub fn parse_key(k: &str) -> Result<Vec<usize>> {
    k.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|_| invalid(format!("bad simplex key {k:?}"))))
        .collect()
}

/// Built-in complexes: `S1`, `S2`, `S3`, `RP2`, `T2`, `RP2xS1`, `S2xS1`.
pub fn builtin_complex(name: &str) -> Result<SimplicialComplex> {
    Ok(match name {
        "S1" => SimplicialComplex::circle(),
        "S2" => SimplicialComplex::sphere(2),
        "S3" => SimplicialComplex::sphere(3),
        "RP2" => SimplicialComplex::rp2(),
        "T2" => SimplicialComplex::torus(),
        "RP2xS1" => product_complex(&SimplicialComplex::rp2(), &SimplicialComplex::circle())?,
        "S2xS1" => product_complex(&SimplicialComplex::sphere(2), &SimplicialComplex::circle())?,
        _ => return Err(invalid(format!("unknown built-in complex {name:?}"))),
    })
}

pub fn complex_to_json(k: &SimplicialComplex) -> Value {
    let mut simplices = serde_json::Map::new();
    for d in 1..=k.dim() {
        let list: Vec<Value> = k.simplices(d).iter().map(|s| serde_json::json!(s)).collect();
        simplices.insert(d.to_string(), Value::Array(list));
    }
    serde_json::json!({ "vertices": k.n_vertices(), "simplices": simplices })
}

/// Either a built-in name or `{"vertices": n, "simplices": {"1": [...], ...}}`.
/// Listed simplices are closed under faces.
pub fn complex_from_json(v: &Value) -> Result<SimplicialComplex> {
    if let Some(name) = v.as_str() {
        return builtin_complex(name);
    }
    #[derive(Deserialize)]
    struct Raw {
        vertices: usize,
        simplices: BTreeMap<String, Vec<Vec<usize>>>,
    }
    let raw = Raw::deserialize(v)?;
    let mut all = Vec::new();
    for (d, list) in raw.simplices {
        let d: usize = d.parse().map_err(|_| invalid(format!("bad dimension key {d:?}")))?;
        for s in list {
            if s.len() != d + 1 {
                return Err(invalid(format!("{s:?} listed as a {d}-simplex")));
            }
            all.push(s);
        }
    }
    SimplicialComplex::from_maximal(raw.vertices, &all)
}

fn ring_name(r: Ring) -> String {
    match r {
        Ring::Integers => "Z".into(),
        Ring::ModP(p) => format!("Z/{p}"),
        Ring::Reals => "R".into(),
    }
}

fn parse_ring(s: &str) -> Result<Ring> {
    match s {
        "Z" => Ok(Ring::Integers),
        "R" => Ok(Ring::Reals),
        _ => s
            .strip_prefix("Z/")
            .and_then(|p| p.parse().ok())
            .map(Ring::ModP)
            .ok_or_else(|| invalid(format!("unknown ring {s:?}"))),
    }
}

/// `{"level": k, "ring": "Z" | "Z/p", "values": {"0,1,2": n, ...}}`; missing
/// simplices are zero.
pub fn cochain_to_json(k: &SimplicialComplex, c: &Cochain) -> Value {
    let values: serde_json::Map<String, Value> = k
        .simplices(c.level)
        .iter()
        .zip(&c.values)
        .filter(|(_, v)| !num_traits::Zero::is_zero(*v))
        .map(|(s, v)| (key(s), serde_json::json!(v.to_i64().expect("small cochain value"))))
        .collect();
    serde_json::json!({ "level": c.level, "ring": ring_name(c.ring), "values": values })
}

pub fn cochain_from_json(k: &SimplicialComplex, v: &Value) -> Result<Cochain> {
    #[derive(Deserialize)]
    struct Raw {
        level: usize,
        ring: String,
        values: BTreeMap<String, i64>,
    }
    let raw = Raw::deserialize(v)?;
    let ring = parse_ring(&raw.ring)?;
    let mut values = vec![BigInt::from(0); k.count(raw.level)];
    for (s, x) in raw.values {
        let s = parse_key(&s)?;
        let i = k.index_of(&s).ok_or_else(|| invalid(format!("{s:?} is not a simplex")))?;
        values[i] = BigInt::from(x);
    }
    let mut c = Cochain::new(k, raw.level, ring, values)?;
    if let Ring::ModP(p) = ring {
        c.values.iter_mut().for_each(|x| *x = num_integer::Integer::mod_floor(&*x, &BigInt::from(p)));
    }
    Ok(c)
}

pub fn family_to_json(f: &TensorFamily<f64>) -> Value {
    let tensors: serde_json::Map<String, Value> =
        f.tensors().iter().enumerate().map(|(i, t)| (i.to_string(), tensor_to_json(t))).collect();
    serde_json::json!({ "complex": complex_to_json(f.complex()), "tensors": tensors })
}

pub fn family_from_json(v: &Value, tol: f64) -> Result<TensorFamily<f64>> {
    let k = complex_from_json(v.get("complex").ok_or_else(|| invalid("family without complex"))?)?;
    let map = v
        .get("tensors")
        .and_then(Value::as_object)
        .ok_or_else(|| invalid("family without tensors"))?;
    let mut slots: Vec<Option<MpsTensor<f64>>> = vec![None; k.n_vertices()];
    for (name, t) in map {
        let i: usize = name.parse().map_err(|_| invalid(format!("bad vertex key {name:?}")))?;
        let slot = slots.get_mut(i).ok_or_else(|| invalid(format!("vertex {i} out of range")))?;
        *slot = Some(tensor_from_json(t)?);
    }
    let tensors = slots
        .into_iter()
        .enumerate()
        .map(|(i, t)| t.ok_or_else(|| invalid(format!("no tensor for vertex {i}"))))
        .collect::<Result<Vec<_>>>()?;
    TensorFamily::new(k, tensors, tol)
}

pub fn phases_to_json(p: &PhaseData<f64>) -> Value {
    let phases: serde_json::Map<String, Value> = p
        .complex()
        .simplices(2)
        .iter()
        .zip(p.lambda())
        .map(|(s, l)| (key(s), serde_json::json!([l.re, l.im])))
        .collect();
    serde_json::json!({ "complex": complex_to_json(p.complex()), "phases": phases })
}

pub fn phases_from_json(v: &Value) -> Result<PhaseData<f64>> {
    let k = complex_from_json(v.get("complex").ok_or_else(|| invalid("phase file without complex"))?)?;
    let map: BTreeMap<String, [f64; 2]> =
        BTreeMap::deserialize(v.get("phases").ok_or_else(|| invalid("phase file without phases"))?)?;
    let mut lambda: Vec<Option<C<f64>>> = vec![None; k.count(2)];
    for (s, [re, im]) in map {
        let s = parse_key(&s)?;
        let i = k.index_of(&s).ok_or_else(|| invalid(format!("{s:?} is not a triangle")))?;
        lambda[i] = Some(C::new(re, im));
    }
    let lambda = lambda
        .into_iter()
        .zip(k.simplices(2))
        .map(|(l, s)| l.ok_or_else(|| invalid(format!("no phase for triangle {s:?}"))))
        .collect::<Result<Vec<_>>>()?;
    PhaseData::new(k, lambda)
}

#[derive(Serialize, Deserialize)]
struct GroupJson {
    #[serde(default)]
    free: usize,
    #[serde(default)]
    torsion: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct BaseJson {
    name: String,
    groups: Vec<GroupJson>,
    m1: Vec<Vec<Vec<i64>>>,
    m2: Vec<Vec<Vec<i64>>>,
}

fn int_matrix(rows: &[Vec<i64>], n_rows: usize, n_cols: usize) -> Result<IntMatrix> {
    if rows.len() != n_rows || rows.iter().any(|r| r.len() != n_cols) {
        return Err(Error::MalformedBase(format!("structure matrix is not {n_rows}×{n_cols}")));
    }
    Ok(IntMatrix::from_fn(n_rows, n_cols, |r, c| BigInt::from(rows[r][c])))
}

fn int_rows(m: &IntMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(|x| x.to_i64().expect("small")).collect()).collect()
}

pub fn base_to_json(b: &BasePresentation) -> Value {
    if b.is_builtin() {
        return Value::String(b.name.clone());
    }
    let j = BaseJson {
        name: b.name.clone(),
        groups: b
            .groups
            .iter()
            .map(|g| GroupJson { free: g.free_rank, torsion: g.torsion_u64().iter().map(|&d| d as i64).collect() })
            .collect(),
        m1: b.m1.iter().map(int_rows).collect(),
        m2: b.m2.iter().map(int_rows).collect(),
    };
    serde_json::to_value(j).expect("serializable")
}

/// A built-in name or `{"name", "groups": [{"free", "torsion"}; 5], "m1",
/// "m2"}` with one structure matrix per `H²` coordinate.
pub fn base_from_json(v: &Value) -> Result<BasePresentation> {
    if let Some(name) = v.as_str() {
        return BasePresentation::builtin(name);
    }
    let raw = BaseJson::deserialize(v).map_err(|e| Error::MalformedBase(e.to_string()))?;
    if raw.groups.len() != 5 {
        return Err(Error::MalformedBase(format!("expected 5 groups, got {}", raw.groups.len())));
    }
    let groups: Vec<AbelianGroup> = raw
        .groups
        .iter()
        .map(|g| AbelianGroup {
            free_rank: g.free,
            torsion: g.torsion.iter().map(|&d| BigInt::from(d)).collect(),
            generators: Vec::new(),
        })
        .collect();
    let n = |k: usize| groups[k].free_rank + groups[k].torsion.len();
    let m1 = raw.m1.iter().map(|m| int_matrix(m, n(3), n(1))).collect::<Result<Vec<_>>>()?;
    let m2 = raw.m2.iter().map(|m| int_matrix(m, n(4), n(2))).collect::<Result<Vec<_>>>()?;
    BasePresentation::custom(raw.name, groups, m1, m2)
}

fn ints(v: &[BigInt]) -> Vec<i64> {
    v.iter().map(|x| x.to_i64().expect("small")).collect()
}

pub fn pair_to_json(p: &TDualPair) -> Value {
    serde_json::json!({
        "base": base_to_json(&p.base),
        "c1": ints(&p.c1),
        "H": { "ker": ints(&p.h.ker), "coker": ints(&p.h.coker) },
        "total_space": p.total_space(),
    })
}

/// Pair file; a missing `coker` is taken as zero.
pub fn pair_from_json(v: &Value) -> Result<TDualPair> {
    #[derive(Deserialize)]
    struct RawH {
        ker: Vec<i64>,
        #[serde(default)]
        coker: Option<Vec<i64>>,
    }
    #[derive(Deserialize)]
    struct Raw {
        base: Value,
        c1: Vec<i64>,
        #[serde(rename = "H")]
        h: RawH,
    }
    let raw = Raw::deserialize(v)?;
    let base = base_from_json(&raw.base)?;
    let big = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let coker = match raw.h.coker {
        Some(c) => big(&c),
        None => HClass::zero(&base).coker,
    };
    TDualPair::new(base, big(&raw.c1), HClass { ker: big(&raw.h.ker), coker })
}

/// Parses JSON text, mapping syntax errors to validation failures.
pub fn parse(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::berry::synthetic_family;

    #[test]
    fn tensor_round_trip() {
        let t = MpsTensor::<f64>::aklt();
        let back = tensor_from_json(&tensor_to_json(&t)).unwrap();
        assert_eq!(back.kraus(), t.kraus());
    }

    #[test]
    fn tensor_shape_errors_are_validation_failures() {
        let mut v = tensor_to_json(&MpsTensor::<f64>::aklt());
        v["phys_dim"] = serde_json::json!(2);
        assert!(tensor_from_json(&v).unwrap_err().is_validation());
        assert!(tensor_from_json(&serde_json::json!({"kraus": 1})).unwrap_err().is_validation());
    }

    #[test]
    fn complex_round_trip() {
        for name in ["S3", "RP2", "T2", "RP2xS1"] {
            let k = builtin_complex(name).unwrap();
            assert_eq!(complex_from_json(&complex_to_json(&k)).unwrap(), k);
        }
    }

    #[test]
    fn phases_round_trip() {
        let k = SimplicialComplex::sphere(3);
        let p = synthetic_family::<f64>(&k, 2, 1e-9).unwrap();
        let back = phases_from_json(&phases_to_json(&p)).unwrap();
        for (a, b) in p.lambda().iter().zip(back.lambda()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn cochain_round_trip() {
        let k = SimplicialComplex::rp2();
        let c = Cochain::from_i64(&k, 2, Ring::ModP(2), &[1, 0, 0, 1, 0, 0, 1, 0, 0, 1]).unwrap();
        assert_eq!(cochain_from_json(&k, &cochain_to_json(&k, &c)).unwrap(), c);
    }

    #[test]
    fn pair_round_trip() {
        let p = TDualPair::sphere(3, 2);
        assert_eq!(pair_from_json(&pair_to_json(&p)).unwrap(), p);
        let v = serde_json::json!({"base": "S2", "c1": [1], "H": {"ker": [0]}});
        assert_eq!(pair_from_json(&v).unwrap(), TDualPair::sphere(1, 0));
        let bad = serde_json::json!({"base": "K3", "c1": [1], "H": {"ker": [0]}});
        assert!(pair_from_json(&bad).unwrap_err().is_validation());
    }

    #[test]
    fn custom_base_round_trip() {
        let v = serde_json::json!({
            "name": "toy",
            "groups": [{"free": 1}, {"free": 1}, {"free": 1}, {"free": 1}, {"free": 1}],
            "m1": [[[3]]],
            "m2": [[[0]]]
        });
        let b = base_from_json(&v).unwrap();
        assert_eq!(base_from_json(&base_to_json(&b)).unwrap(), b);
    }
}
