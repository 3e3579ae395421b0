//! On-disk cache for eigen-data and plus-space bases.
//!
//! One JSON file per (kind, k, nmax, prec_bits, schema_version). Reals are stored
//! as exact hexadecimal significand/exponent strings plus the bit pattern of
//! their error bound, rationals as "num/den". The payload is hashed with
//! SHA-256; a file whose hash does not match is ignored and recomputed.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use extremal::eigenforms::HeckeEigenform;
use extremal::kohnenplus::HalfIntegralForm;
use extremal::specialfn::ErrBoundedReal;
use rug::{Float, Rational};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Eigen,
    PlusBasis,
}

impl Kind {
    fn tag(self) -> &'static str {
        match self {
            Kind::Eigen => "eigen",
            Kind::PlusBasis => "plusbasis",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub schema_version: u32,
    pub kind: String,
    pub k: u32,
    pub nmax: usize,
    pub prec_bits: u32,
    pub payload: Value,
    pub content_hash: String,
}

pub fn content_hash(payload: &Value) -> String {
    // payloads are built with a fixed key order and reread in file order
    let s = serde_json::to_string(payload).expect("json values serialize");
    hex::encode(Sha256::digest(s.as_bytes()))
}

pub fn float_hex(x: &Float) -> String {
    x.to_string_radix(16, None)
}

pub fn float_from_hex(s: &str, prec: u32) -> Option<Float> {
    let parsed = Float::parse_radix(s, 16).ok()?;
    Some(Float::with_val(prec, parsed))
}

pub fn real_to_json(x: &ErrBoundedReal) -> Value {
    json!({ "hex": float_hex(&x.value), "err": format!("{:016x}", x.err.to_bits()) })
}

pub fn real_from_json(v: &Value, prec: u32) -> Option<ErrBoundedReal> {
    let value = float_from_hex(v.get("hex")?.as_str()?, prec)?;
    let err = f64::from_bits(u64::from_str_radix(v.get("err")?.as_str()?, 16).ok()?);
    if !(err >= 0.0) {
        return None;
    }
    Some(ErrBoundedReal::new(value, err))
}

fn eigen_payload(forms: &[HeckeEigenform]) -> Value {
    Value::Array(
        forms
            .iter()
            .map(|f| {
                json!({
                    "eigen_index": f.eigen_index,
                    "fricke_sign": f.fricke_sign,
                    "lambda": f.lambda.iter().map(real_to_json).collect::<Vec<_>>(),
                })
            })
            .collect(),
    )
}

fn eigen_from_payload(v: &Value, k: u32, nmax: usize, prec: u32) -> Option<Vec<HeckeEigenform>> {
    let mut out = Vec::new();
    for f in v.as_array()? {
        let lambda = f
            .get("lambda")?
            .as_array()?
            .iter()
            .map(|x| real_from_json(x, prec))
            .collect::<Option<Vec<_>>>()?;
        if lambda.len() != nmax {
            return None;
        }
        out.push(HeckeEigenform {
            k,
            eigen_index: f.get("eigen_index")?.as_u64()? as usize,
            lambda,
            fricke_sign: f.get("fricke_sign")?.as_i64()? as i32,
            prec_bits: prec,
        });
    }
    Some(out)
}

fn plus_payload(forms: &[HalfIntegralForm]) -> Value {
    Value::Array(
        forms
            .iter()
            .map(|g| {
                json!({
                    "coeffs": g.coeffs.iter().map(real_to_json).collect::<Vec<_>>(),
                    "exact": g.exact.as_ref().map(|e| e.iter().map(|c| c.to_string()).collect::<Vec<_>>()),
                    "monomial_coeffs": g.monomial_coeffs.iter().map(float_hex).collect::<Vec<_>>(),
                    "plus_flag": g.plus_flag,
                    "eigenform": g.eigenform,
                    "shimura_partner": g.shimura_partner,
                    "hecke": g.hecke.as_ref().map(|(p, t)| json!({ "p": p, "eigenvalue": float_hex(t) })),
                    "scale_tag": g.scale_tag,
                })
            })
            .collect(),
    )
}

fn plus_from_payload(v: &Value, k: u32, prec: u32) -> Option<Vec<HalfIntegralForm>> {
    let mut out = Vec::new();
    for g in v.as_array()? {
        let coeffs = g
            .get("coeffs")?
            .as_array()?
            .iter()
            .map(|x| real_from_json(x, prec))
            .collect::<Option<Vec<_>>>()?;
        let exact = match g.get("exact")? {
            Value::Null => None,
            e => Some(
                e.as_array()?
                    .iter()
                    .map(|c| Rational::from_str(c.as_str()?).ok())
                    .collect::<Option<Vec<_>>>()?,
            ),
        };
        let monomial_coeffs = g
            .get("monomial_coeffs")?
            .as_array()?
            .iter()
            .map(|c| float_from_hex(c.as_str()?, prec))
            .collect::<Option<Vec<_>>>()?;
        let hecke = match g.get("hecke")? {
            Value::Null => None,
            h => Some((h.get("p")?.as_u64()?, float_from_hex(h.get("eigenvalue")?.as_str()?, prec)?)),
        };
        let shimura_partner = match g.get("shimura_partner")? {
            Value::Null => None,
            p => Some(p.as_u64()? as usize),
        };
        out.push(HalfIntegralForm {
            k,
            coeffs,
            exact,
            monomial_coeffs,
            plus_flag: g.get("plus_flag")?.as_bool()?,
            eigenform: g.get("eigenform")?.as_bool()?,
            shimura_partner,
            hecke,
            scale_tag: g.get("scale_tag")?.as_str()?.to_string(),
        });
    }
    Some(out)
}

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn path(&self, kind: Kind, k: u32, nmax: usize, prec: u32) -> Option<PathBuf> {
        self.dir
            .as_ref()
            .map(|d| d.join(format!("{}-k{k}-n{nmax}-p{prec}-v{SCHEMA_VERSION}.json", kind.tag())))
    }

    /// The verified payload, or `None` when absent, stale or corrupted.
    fn load(&self, kind: Kind, k: u32, nmax: usize, prec: u32) -> Option<Value> {
        let path = self.path(kind, k, nmax, prec)?;
        let text = fs::read_to_string(&path).ok()?;
        let entry: CacheEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(e) => {
                eprintln!("warning: unreadable cache file {}: {e}; recomputing", path.display());
                return None;
            }
        };
        let key_ok = entry.schema_version == SCHEMA_VERSION
            && entry.kind == kind.tag()
            && entry.k == k
            && entry.nmax == nmax
            && entry.prec_bits == prec;
        if !key_ok {
            eprintln!("warning: cache key mismatch in {}; recomputing", path.display());
            return None;
        }
        if content_hash(&entry.payload) != entry.content_hash {
            eprintln!("warning: content hash mismatch in {}; recomputing", path.display());
            return None;
        }
        Some(entry.payload)
    }

    fn store(&self, kind: Kind, k: u32, nmax: usize, prec: u32, payload: Value) -> std::io::Result<()> {
        let Some(path) = self.path(kind, k, nmax, prec) else {
            return Ok(());
        };
        let dir = self.dir.as_ref().expect("path implies dir");
        fs::create_dir_all(dir)?;
        let entry = CacheEntry {
            schema_version: SCHEMA_VERSION,
            kind: kind.tag().to_string(),
            k,
            nmax,
            prec_bits: prec,
            content_hash: content_hash(&payload),
            payload,
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        serde_json::to_writer(&mut tmp, &entry)?;
        tmp.flush()?;
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(())
    }

    pub fn eigenforms(&self, k: u32, nmax: usize, prec: u32) -> extremal::Result<Vec<HeckeEigenform>> {
        if let Some(forms) = self
            .load(Kind::Eigen, k, nmax, prec)
            .and_then(|p| eigen_from_payload(&p, k, nmax, prec))
        {
            return Ok(forms);
        }
        let forms = extremal::eigenforms::eigenforms(k, nmax, prec)?;
        if let Err(e) = self.store(Kind::Eigen, k, nmax, prec, eigen_payload(&forms)) {
            eprintln!("warning: could not write cache: {e}");
        }
        Ok(forms)
    }

    /// Shimura-matched plus-space eigenforms, keyed by their truncation order.
    pub fn plus_basis(&self, k: u32, nmax: usize, prec: u32) -> extremal::Result<Vec<HalfIntegralForm>> {
        if let Some(gs) = self
            .load(Kind::PlusBasis, k, nmax, prec)
            .and_then(|p| plus_from_payload(&p, k, prec))
        {
            return Ok(gs);
        }
        let gs = extremal::kohnenplus::shimura_match(k, nmax, prec)?;
        if let Err(e) = self.store(Kind::PlusBasis, k, nmax, prec, plus_payload(&gs)) {
            eprintln!("warning: could not write cache: {e}");
        }
        Ok(gs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_floats_round_trip_exactly() {
        let prec = 200;
        for x in [Float::with_val(prec, 1) / 3u32, Float::with_val(prec, -2.5e-300), Float::with_val(prec, 0)] {
            let back = float_from_hex(&float_hex(&x), prec).unwrap();
            assert_eq!(back, x);
            assert_eq!(back.prec(), prec);
        }
    }

    #[test]
    fn negative_error_is_rejected() {
        let v = json!({ "hex": "1", "err": format!("{:016x}", (-1.0f64).to_bits()) });
        assert!(real_from_json(&v, 64).is_none());
    }
}
