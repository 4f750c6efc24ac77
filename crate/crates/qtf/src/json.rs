//! JSON documents for filters, banks, transform trees, and reports.
//!
//! All numeric payloads are exact rational strings (`"p"` or `"p/q"`); decimal
//! or float input is rejected. Schema violations report the JSON-pointer path
//! of the offending node.

use num_traits::{Signed, Zero};
use serde_json::{json, Map, Value};

use crate::dft::{Decomposition, ScaledArray};
use crate::error::{Error, Result};
use crate::filterbank::{BankMeta, QtfBank, ScaledFilter, Sign};
use crate::lattice::{make_context, DilationContext};
use crate::laurent::{LaurentMatrix, RationalLaurent};
use crate::ratio::{format_rational, parse_rational, Rat};
use crate::specfact::HermitianFactorization;

fn schema(path: &str, msg: impl Into<String>) -> Error {
    Error::SchemaError {
        path: path.to_string(),
        msg: msg.into(),
    }
}

fn as_obj<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn as_arr<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn as_i64(v: &Value, path: &str) -> Result<i64> {
    v.as_i64().ok_or_else(|| schema(path, "expected an integer"))
}

fn get<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(path, format!("missing required field {key:?}")))
}

fn reject_unknown(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(schema(&format!("{path}/{key}"), "unknown field"));
        }
    }
    Ok(())
}

fn parse_rat_field(v: &Value, path: &str) -> Result<Rat> {
    match v {
        Value::String(s) => parse_rational(s, path),
        Value::Number(n) => Err(Error::NonRational {
            path: path.to_string(),
            text: n.to_string(),
        }),
        _ => Err(schema(path, "expected a rational string")),
    }
}

/// Parses `{"dim": d, "terms": [{"k": [...], "v": "p/q"}, ...]}`.
pub fn parse_laurent_value(v: &Value, path: &str) -> Result<RationalLaurent> {
    let obj = as_obj(v, path)?;
    reject_unknown(obj, &["dim", "terms"], path)?;
    let dim_path = format!("{path}/dim");
    let dim = as_i64(get(obj, "dim", path)?, &dim_path)?;
    if dim < 1 {
        return Err(schema(&dim_path, "dimension must be at least 1"));
    }
    let dim = dim as usize;
    let terms_path = format!("{path}/terms");
    let terms = as_arr(get(obj, "terms", path)?, &terms_path)?;
    let mut out = RationalLaurent::zero(dim);
    for (i, term) in terms.iter().enumerate() {
        let tpath = format!("{terms_path}/{i}");
        let tobj = as_obj(term, &tpath)?;
        reject_unknown(tobj, &["k", "v"], &tpath)?;
        let kpath = format!("{tpath}/k");
        let karr = as_arr(get(tobj, "k", &tpath)?, &kpath)?;
        if karr.len() != dim {
            return Err(schema(
                &kpath,
                format!("exponent has {} entries, expected {}", karr.len(), dim),
            ));
        }
        let mut k = Vec::with_capacity(dim);
        for (j, kv) in karr.iter().enumerate() {
            k.push(as_i64(kv, &format!("{kpath}/{j}"))?);
        }
        if !out.coeff(&k).is_zero() {
            return Err(schema(&kpath, "duplicate exponent"));
        }
        let vpath = format!("{tpath}/v");
        let c = parse_rat_field(get(tobj, "v", &tpath)?, &vpath)?;
        out.add_term(&k, &c);
    }
    Ok(out)
}

pub fn laurent_to_value(u: &RationalLaurent) -> Value {
    let terms: Vec<Value> = u
        .terms()
        .map(|(k, c)| json!({"k": k, "v": format_rational(c)}))
        .collect();
    json!({"dim": u.dim(), "terms": terms})
}

fn parse_dilation(v: &Value, path: &str) -> Result<DilationContext> {
    let rows = as_arr(v, path)?;
    let mut mat = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let rpath = format!("{path}/{i}");
        let cols = as_arr(row, &rpath)?;
        let mut out = Vec::with_capacity(cols.len());
        for (j, cell) in cols.iter().enumerate() {
            out.push(as_i64(cell, &format!("{rpath}/{j}"))?);
        }
        mat.push(out);
    }
    make_context(&mat)
}

fn parse_meta(v: &Value, path: &str) -> Result<(BankMeta, Option<usize>)> {
    let obj = as_obj(v, path)?;
    reject_unknown(obj, &["name", "source", "claimed_vmo"], path)?;
    let mut meta = BankMeta::default();
    if let Some(n) = obj.get("name") {
        meta.name = Some(as_str(n, &format!("{path}/name"))?.to_string());
    }
    if let Some(s) = obj.get("source") {
        meta.source = Some(as_str(s, &format!("{path}/source"))?.to_string());
    }
    let mut claimed = None;
    if let Some(c) = obj.get("claimed_vmo") {
        let cpath = format!("{path}/claimed_vmo");
        let n = as_i64(c, &cpath)?;
        if n < 0 {
            return Err(schema(&cpath, "claimed_vmo must be nonnegative"));
        }
        claimed = Some(n as usize);
    }
    Ok((meta, claimed))
}

/// Parses a full bank document.
pub fn parse_bank_value(v: &Value) -> Result<QtfBank> {
    let obj = as_obj(v, "")?;
    reject_unknown(obj, &["dilation", "lowpass", "highpass", "meta"], "")?;
    let ctx = parse_dilation(get(obj, "dilation", "")?, "/dilation")?;
    let lowpass = parse_laurent_value(get(obj, "lowpass", "")?, "/lowpass")?;
    if lowpass.dim() != ctx.dim() {
        return Err(schema(
            "/lowpass/dim",
            format!("dimension {} does not match dilation {}", lowpass.dim(), ctx.dim()),
        ));
    }
    let hp_path = "/highpass";
    let hp_arr = as_arr(get(obj, "highpass", "")?, hp_path)?;
    let mut highpass = Vec::with_capacity(hp_arr.len());
    for (i, item) in hp_arr.iter().enumerate() {
        let ipath = format!("{hp_path}/{i}");
        let iobj = as_obj(item, &ipath)?;
        reject_unknown(iobj, &["scale_sq", "base", "sign"], &ipath)?;
        let spath = format!("{ipath}/scale_sq");
        let scale_sq = parse_rat_field(get(iobj, "scale_sq", &ipath)?, &spath)?;
        if scale_sq.is_negative() {
            return Err(schema(&spath, "scale_sq must be nonnegative"));
        }
        let base = parse_laurent_value(get(iobj, "base", &ipath)?, &format!("{ipath}/base"))?;
        if base.dim() != ctx.dim() {
            return Err(schema(
                &format!("{ipath}/base/dim"),
                format!("dimension {} does not match dilation {}", base.dim(), ctx.dim()),
            ));
        }
        let gpath = format!("{ipath}/sign");
        let sign_raw = as_i64(get(iobj, "sign", &ipath)?, &gpath)?;
        let sign = Sign::from_i64(sign_raw)
            .ok_or_else(|| schema(&gpath, "sign must be 1 or -1"))?;
        highpass.push((ScaledFilter::new(scale_sq, base)?, sign));
    }
    let (meta, claimed) = match obj.get("meta") {
        Some(m) => parse_meta(m, "/meta")?,
        None => (BankMeta::default(), None),
    };
    Ok(QtfBank::new(ctx, lowpass, highpass, claimed.unwrap_or(1))?.with_meta(meta))
}

pub fn bank_to_value(bank: &QtfBank) -> Value {
    let highpass: Vec<Value> = bank
        .highpass()
        .iter()
        .map(|(f, s)| {
            json!({
                "scale_sq": format_rational(f.scale_sq()),
                "base": laurent_to_value(f.base()),
                "sign": s.value(),
            })
        })
        .collect();
    let mut meta = Map::new();
    if let Some(name) = &bank.meta().name {
        meta.insert("name".into(), Value::String(name.clone()));
    }
    if let Some(source) = &bank.meta().source {
        meta.insert("source".into(), Value::String(source.clone()));
    }
    meta.insert("claimed_vmo".into(), json!(bank.claimed_vmo()));
    json!({
        "dilation": bank.ctx().matrix(),
        "lowpass": laurent_to_value(bank.lowpass()),
        "highpass": highpass,
        "meta": Value::Object(meta),
    })
}

/// Reads `(dilation, lowpass, meta)` from either a filter document or a full
/// bank document (whose high-pass list is ignored).
pub fn parse_lowpass_value(v: &Value) -> Result<(DilationContext, RationalLaurent, BankMeta)> {
    let obj = as_obj(v, "")?;
    if obj.contains_key("highpass") {
        let bank = parse_bank_value(v)?;
        let meta = bank.meta().clone();
        return Ok((bank.ctx().clone(), bank.lowpass().clone(), meta));
    }
    reject_unknown(obj, &["dilation", "lowpass", "meta"], "")?;
    let ctx = parse_dilation(get(obj, "dilation", "")?, "/dilation")?;
    let lowpass = parse_laurent_value(get(obj, "lowpass", "")?, "/lowpass")?;
    if lowpass.dim() != ctx.dim() {
        return Err(schema(
            "/lowpass/dim",
            format!("dimension {} does not match dilation {}", lowpass.dim(), ctx.dim()),
        ));
    }
    let meta = match obj.get("meta") {
        Some(m) => parse_meta(m, "/meta")?.0,
        None => BankMeta::default(),
    };
    Ok((ctx, lowpass, meta))
}

pub fn lowpass_to_value(ctx: &DilationContext, a: &RationalLaurent, meta: &BankMeta) -> Value {
    let mut m = Map::new();
    if let Some(name) = &meta.name {
        m.insert("name".into(), Value::String(name.clone()));
    }
    if let Some(source) = &meta.source {
        m.insert("source".into(), Value::String(source.clone()));
    }
    json!({
        "dilation": ctx.matrix(),
        "lowpass": laurent_to_value(a),
        "meta": Value::Object(m),
    })
}

/// Serializes a multiscale decomposition.
pub fn decomposition_to_value(dec: &Decomposition) -> Value {
    let details: Vec<Value> = dec
        .details
        .iter()
        .map(|level| {
            let items: Vec<Value> = level
                .iter()
                .map(|sa| {
                    json!({
                        "scale_sq": format_rational(&sa.scale_sq),
                        "coeffs": laurent_to_value(&sa.coeffs),
                    })
                })
                .collect();
            Value::Array(items)
        })
        .collect();
    json!({
        "levels": dec.details.len(),
        "approx": laurent_to_value(&dec.approx),
        "details": details,
    })
}

pub fn parse_decomposition_value(v: &Value) -> Result<Decomposition> {
    let obj = as_obj(v, "")?;
    reject_unknown(obj, &["levels", "approx", "details"], "")?;
    let approx = parse_laurent_value(get(obj, "approx", "")?, "/approx")?;
    let details_arr = as_arr(get(obj, "details", "")?, "/details")?;
    let levels = as_i64(get(obj, "levels", "")?, "/levels")?;
    if levels != details_arr.len() as i64 {
        return Err(schema("/levels", "levels does not match the detail list"));
    }
    let mut details = Vec::with_capacity(details_arr.len());
    for (l, level) in details_arr.iter().enumerate() {
        let lpath = format!("/details/{l}");
        let items = as_arr(level, &lpath)?;
        let mut out = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            let ipath = format!("{lpath}/{i}");
            let iobj = as_obj(item, &ipath)?;
            reject_unknown(iobj, &["scale_sq", "coeffs"], &ipath)?;
            let spath = format!("{ipath}/scale_sq");
            let scale_sq = parse_rat_field(get(iobj, "scale_sq", &ipath)?, &spath)?;
            if scale_sq.is_negative() {
                return Err(schema(&spath, "scale_sq must be nonnegative"));
            }
            let coeffs =
                parse_laurent_value(get(iobj, "coeffs", &ipath)?, &format!("{ipath}/coeffs"))?;
            out.push(ScaledArray { scale_sq, coeffs });
        }
        details.push(out);
    }
    Ok(Decomposition { approx, details })
}

/// Parses `{"rows": r, "cols": c, "entries": [[<laurent>, ...], ...]}`.
pub fn parse_matrix_value(v: &Value) -> Result<LaurentMatrix> {
    let obj = as_obj(v, "")?;
    reject_unknown(obj, &["rows", "cols", "entries"], "")?;
    let rows = as_i64(get(obj, "rows", "")?, "/rows")?;
    let cols = as_i64(get(obj, "cols", "")?, "/cols")?;
    if rows < 1 || cols < 1 {
        return Err(schema("/rows", "matrix shape must be positive"));
    }
    let entries_arr = as_arr(get(obj, "entries", "")?, "/entries")?;
    if entries_arr.len() != rows as usize {
        return Err(schema("/entries", "row count does not match rows"));
    }
    let mut entries = Vec::with_capacity((rows * cols) as usize);
    for (r, row) in entries_arr.iter().enumerate() {
        let rpath = format!("/entries/{r}");
        let cells = as_arr(row, &rpath)?;
        if cells.len() != cols as usize {
            return Err(schema(&rpath, "column count does not match cols"));
        }
        for (c, cell) in cells.iter().enumerate() {
            entries.push(parse_laurent_value(cell, &format!("{rpath}/{c}"))?);
        }
    }
    LaurentMatrix::from_entries(rows as usize, cols as usize, entries)
}

pub fn matrix_to_value(m: &LaurentMatrix) -> Value {
    let entries: Vec<Value> = (0..m.rows())
        .map(|r| {
            Value::Array(
                (0..m.cols())
                    .map(|c| laurent_to_value(m.get(r, c)))
                    .collect(),
            )
        })
        .collect();
    json!({"rows": m.rows(), "cols": m.cols(), "entries": entries})
}

/// Serializes a signed-square factorization of a Hermitian matrix.
pub fn factorization_to_value(f: &HermitianFactorization) -> Value {
    let kappa: Vec<Value> = f
        .kappa
        .iter()
        .map(|k| Value::String(format_rational(k)))
        .collect();
    let terms: Vec<Value> = f
        .terms
        .iter()
        .map(|t| {
            json!({
                "scale_sq": format_rational(&t.scale_sq),
                "sign": t.sign.value(),
                "column": t.column.iter().map(laurent_to_value).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({"kappa": kappa, "terms": terms})
}

pub fn parse_bank_str(text: &str) -> Result<QtfBank> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    parse_bank_value(&v)
}

pub fn parse_lowpass_str(text: &str) -> Result<(DilationContext, RationalLaurent, BankMeta)> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    parse_lowpass_value(&v)
}

pub fn parse_laurent_str(text: &str) -> Result<RationalLaurent> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    parse_laurent_value(&v, "")
}

pub fn parse_decomposition_str(text: &str) -> Result<Decomposition> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    parse_decomposition_value(&v)
}

pub fn parse_matrix_str(text: &str) -> Result<LaurentMatrix> {
    let v: Value = serde_json::from_str(text)
        .map_err(|e| schema("", format!("invalid JSON: {e}")))?;
    parse_matrix_value(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn laurent_roundtrip() {
        let text = r#"{"dim": 1, "terms": [{"k":[0],"v":"1/2"},{"k":[1],"v":"1/2"}]}"#;
        let u = parse_laurent_str(text).unwrap();
        assert_eq!(u.num_terms(), 2);
        assert_eq!(u.coeff(&[0]), Rat::new(1.into(), 2.into()));
        let v = laurent_to_value(&u);
        let back = parse_laurent_value(&v, "").unwrap();
        assert_eq!(u, back);
    }

    #[test]
    fn decimal_rejected_with_path() {
        let text = r#"{"dim": 1, "terms": [{"k":[0],"v":"0.5"}]}"#;
        match parse_laurent_str(text) {
            Err(Error::NonRational { path, text }) => {
                assert_eq!(path, "/terms/0/v");
                assert_eq!(text, "0.5");
            }
            other => panic!("expected NonRational, got {other:?}"),
        }
        let num = r#"{"dim": 1, "terms": [{"k":[0],"v":0.5}]}"#;
        assert!(matches!(
            parse_laurent_str(num),
            Err(Error::NonRational { .. })
        ));
    }

    #[test]
    fn schema_errors_carry_pointers() {
        let text = r#"{"dim": 1, "terms": [{"k":[0,1],"v":"1"}]}"#;
        match parse_laurent_str(text) {
            Err(Error::SchemaError { path, .. }) => assert_eq!(path, "/terms/0/k"),
            other => panic!("expected SchemaError, got {other:?}"),
        }
        let dup = r#"{"dim": 1, "terms": [{"k":[2],"v":"1"},{"k":[2],"v":"3"}]}"#;
        match parse_laurent_str(dup) {
            Err(Error::SchemaError { path, .. }) => assert_eq!(path, "/terms/1/k"),
            other => panic!("expected SchemaError, got {other:?}"),
        }
    }

    #[test]
    fn bank_roundtrip() {
        let text = r#"{
            "dilation": [[2]],
            "lowpass": {"dim":1,"terms":[{"k":[0],"v":"1/2"},{"k":[1],"v":"1/2"}]},
            "highpass": [
              {"scale_sq":"1/4",
               "base":{"dim":1,"terms":[{"k":[0],"v":"1"},{"k":[1],"v":"-1"}]},
               "sign":1}
            ],
            "meta": {"name":"haar","source":"test","claimed_vmo":1}
        }"#;
        let bank = parse_bank_str(text).unwrap();
        assert_eq!(bank.highpass().len(), 1);
        assert!(bank.is_tight());
        assert_eq!(bank.meta().name.as_deref(), Some("haar"));
        let v = bank_to_value(&bank);
        let back = parse_bank_value(&v).unwrap();
        assert_eq!(back.lowpass(), bank.lowpass());
        assert_eq!(back.highpass()[0].0, bank.highpass()[0].0);
        assert_eq!(back.claimed_vmo(), 1);
    }

    #[test]
    fn bank_schema_violations() {
        let bad_sign = r#"{
            "dilation": [[2]],
            "lowpass": {"dim":1,"terms":[]},
            "highpass": [{"scale_sq":"1","base":{"dim":1,"terms":[]},"sign":2}]
        }"#;
        match parse_bank_str(bad_sign) {
            Err(Error::SchemaError { path, .. }) => assert_eq!(path, "/highpass/0/sign"),
            other => panic!("expected SchemaError, got {other:?}"),
        }
        let bad_dim = r#"{
            "dilation": [[2]],
            "lowpass": {"dim":2,"terms":[]},
            "highpass": []
        }"#;
        assert!(matches!(parse_bank_str(bad_dim), Err(Error::SchemaError { .. })));
        let unknown = r#"{"dilation": [[2]], "lowpass": {"dim":1,"terms":[]}, "highpass": [], "extra": 1}"#;
        match parse_bank_str(unknown) {
            Err(Error::SchemaError { path, .. }) => assert_eq!(path, "/extra"),
            other => panic!("expected SchemaError, got {other:?}"),
        }
    }

    #[test]
    fn matrix_roundtrip() {
        let text = r#"{
            "rows": 2, "cols": 2,
            "entries": [
              [{"dim":1,"terms":[{"k":[0],"v":"1"}]}, {"dim":1,"terms":[]}],
              [{"dim":1,"terms":[{"k":[1],"v":"-1"}]}, {"dim":1,"terms":[{"k":[0],"v":"1"}]}]
            ]
        }"#;
        let m = parse_matrix_str(text).unwrap();
        assert_eq!((m.rows(), m.cols()), (2, 2));
        let back = parse_matrix_value(&matrix_to_value(&m)).unwrap();
        assert_eq!(back.get(1, 0), m.get(1, 0));
        let bad = r#"{"rows": 2, "cols": 1, "entries": [[{"dim":1,"terms":[]}]]}"#;
        assert!(matches!(parse_matrix_str(bad), Err(Error::SchemaError { .. })));
    }

    #[test]
    fn factorization_serialization_shape() {
        let m = LaurentMatrix::identity(2, 1);
        let f = crate::specfact::factor_hermitian(&m).unwrap();
        let v = factorization_to_value(&f);
        assert_eq!(v["kappa"], serde_json::json!(["1", "1"]));
        assert!(v["terms"].as_array().unwrap().is_empty());
    }

    #[test]
    fn lowpass_accepts_bank_documents() {
        let text = r#"{
            "dilation": [[2]],
            "lowpass": {"dim":1,"terms":[{"k":[0],"v":"1"}]},
            "highpass": []
        }"#;
        let (ctx, a, _) = parse_lowpass_str(text).unwrap();
        assert_eq!(ctx.dm(), 2);
        assert!(a.value_at_zero().is_one());
    }
}
