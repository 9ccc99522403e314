//! Tensor files (JSON):
//!
//! ```json
//! {"dims": [3, 3, 4], "mode": "rational", "entries": ["1/2", "3", ...]}
//! ```
//!
//! `mode` is `rational` (entries as `"a/b"` or `"a"` strings), `gfp`
//! (integer residues, `modulus` required) or `float` (JSON numbers).

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::field::{parse_rational, Field, Float64, PrimeField, Rationals};
use crate::tensor::Tensor3;

#[derive(Debug, Serialize, Deserialize)]
struct TensorFile {
    dims: Vec<usize>,
    mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    modulus: Option<u64>,
    entries: Vec<Value>,
}

/// A tensor in whichever scalar mode its file declared.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyTensor {
    Rational(Tensor3<Rationals>),
    Gfp(Tensor3<PrimeField>),
    Float(Tensor3<Float64>),
}

impl AnyTensor {
    pub fn dims(&self) -> (usize, usize, usize) {
        match self {
            AnyTensor::Rational(t) => t.dims(),
            AnyTensor::Gfp(t) => t.dims(),
            AnyTensor::Float(t) => t.dims(),
        }
    }
}

/// Field types that have a representation in tensor files.
pub trait FileField: Field {
    fn mode_name(&self) -> &'static str;
    fn modulus(&self) -> Option<u64> {
        None
    }
    fn entry_to_json(&self, e: &Self::Elem) -> Value;
}

impl FileField for Rationals {
    fn mode_name(&self) -> &'static str {
        "rational"
    }
    fn entry_to_json(&self, e: &Self::Elem) -> Value {
        Value::String(self.format(e))
    }
}

impl FileField for PrimeField {
    fn mode_name(&self) -> &'static str {
        "gfp"
    }
    fn modulus(&self) -> Option<u64> {
        Some(PrimeField::modulus(self))
    }
    fn entry_to_json(&self, e: &u64) -> Value {
        Value::from(*e)
    }
}

impl FileField for Float64 {
    fn mode_name(&self) -> &'static str {
        "float"
    }
    fn entry_to_json(&self, e: &f64) -> Value {
        serde_json::Number::from_f64(*e)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

pub fn write_tensor<F: FileField>(t: &Tensor3<F>) -> String {
    let f = t.field();
    let (m, n, l) = t.dims();
    let file = TensorFile {
        dims: vec![m, n, l],
        mode: f.mode_name().to_string(),
        modulus: f.modulus(),
        entries: t.entries().iter().map(|e| f.entry_to_json(e)).collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("serializable");
    s.push('\n');
    s
}

fn mixed(mode: &str, v: &Value) -> Error {
    Error::ModeMismatch(mode.to_string(), format!("entry {v}"))
}

fn integer_entry(v: &Value, mode: &str) -> Result<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integer")),
        Value::String(s) if !s.contains('/') && !s.contains('.') => s
            .trim()
            .parse()
            .map_err(|_| Error::MalformedTensor(format!("bad entry {v}"))),
        _ => Err(mixed(mode, v)),
    }
}

pub fn read_tensor(text: &str) -> Result<AnyTensor> {
    let file: TensorFile =
        serde_json::from_str(text).map_err(|e| Error::MalformedTensor(e.to_string()))?;
    let dims = match file.dims.as_slice() {
        &[m, n, l] => (m, n, l),
        _ => return Err(Error::MalformedTensor("dims must have three entries".into())),
    };
    let expected = dims.0 * dims.1 * dims.2;
    if file.entries.len() != expected {
        return Err(Error::DimensionMismatch(format!(
            "{} entries declared {}x{}x{}",
            file.entries.len(),
            dims.0,
            dims.1,
            dims.2
        )));
    }
    match file.mode.as_str() {
        "rational" => {
            let entries = file
                .entries
                .iter()
                .map(|v| match v {
                    Value::String(s) => parse_rational(s)
                        .map_err(|_| Error::MalformedTensor(format!("bad rational {v}"))),
                    Value::Number(_) => integer_entry(v, "rational").map(|i| Rationals.from_bigint(&i)),
                    _ => Err(mixed("rational", v)),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyTensor::Rational(Tensor3::new(Rationals, dims, entries)?))
        }
        "gfp" => {
            let p = file
                .modulus
                .ok_or_else(|| Error::MalformedTensor("gfp mode needs a modulus".into()))?;
            let f = PrimeField::new(p)?;
            let entries = file
                .entries
                .iter()
                .map(|v| integer_entry(v, "gfp").map(|i| f.from_bigint(&i)))
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyTensor::Gfp(Tensor3::new(f, dims, entries)?))
        }
        "float" => {
            let entries = file
                .entries
                .iter()
                .map(|v| v.as_f64().ok_or_else(|| mixed("float", v)))
                .collect::<Result<Vec<_>>>()?;
            Ok(AnyTensor::Float(Tensor3::new(Float64, dims, entries)?))
        }
        other => Err(Error::MalformedTensor(format!("unknown mode '{other}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::P61;
    use crate::sample;
    use proptest::prelude::*;

    #[test]
    fn canonical_rationals() {
        let mut entries = vec![Value::from("0"); 36];
        entries[0] = Value::from("3/6");
        entries[1] = Value::from(-4);
        let text = serde_json::json!({"dims": [3, 3, 4], "mode": "rational", "entries": entries})
            .to_string();
        let AnyTensor::Rational(t) = read_tensor(&text).unwrap() else {
            panic!("wrong mode")
        };
        assert_eq!(t.entry_strings()[0], "1/2");
        assert_eq!(t.entry_strings()[1], "-4");
        assert!(write_tensor(&t).contains("\"1/2\""));
    }

    #[test]
    fn rejects_bad_files() {
        let entries = vec![Value::from("1"); 35];
        let text = serde_json::json!({"dims": [3, 3, 4], "mode": "rational", "entries": entries})
            .to_string();
        assert!(matches!(read_tensor(&text), Err(Error::DimensionMismatch(_))));

        let mut entries = vec![Value::from(1); 8];
        entries[3] = Value::from("1/2");
        let text = serde_json::json!({"dims": [2, 2, 2], "mode": "gfp", "modulus": 7, "entries": entries})
            .to_string();
        assert!(matches!(read_tensor(&text), Err(Error::ModeMismatch(_, _))));

        let mut entries = vec![Value::from("1"); 8];
        entries[0] = Value::from(0.5);
        let text = serde_json::json!({"dims": [2, 2, 2], "mode": "rational", "entries": entries})
            .to_string();
        assert!(matches!(read_tensor(&text), Err(Error::ModeMismatch(_, _))));

        let text = serde_json::json!({"dims": [2, 2, 2], "mode": "gfp", "entries": vec![1; 8]})
            .to_string();
        assert!(matches!(read_tensor(&text), Err(Error::MalformedTensor(_))));
        assert!(read_tensor("{not json").is_err());
        let text = serde_json::json!({"dims": [2, 2, 2], "mode": "gfp", "modulus": 8, "entries": vec![1; 8]})
            .to_string();
        assert!(matches!(read_tensor(&text), Err(Error::NotPrime(8))));
    }

    proptest! {
        #[test]
        fn round_trip_all_modes(seed in any::<u64>(), m in 1usize..=4, n in 1usize..=4, l in 1usize..=4) {
            let t = sample::dense(Rationals, (m, n, l), 1000, seed);
            let half = Rationals.parse("1/2").unwrap();
            let t = t.scale(&half);
            prop_assert_eq!(read_tensor(&write_tensor(&t)).unwrap(), AnyTensor::Rational(t));

            let f = PrimeField::new(P61).unwrap();
            let t = sample::dense(f, (m, n, l), 1000, seed);
            prop_assert_eq!(read_tensor(&write_tensor(&t)).unwrap(), AnyTensor::Gfp(t));

            let mut rng = crate::rng::seeded(seed);
            let t = Tensor3::from_fn(Float64, (m, n, l), |_, _, _| {
                Float64.random_uniform(&mut rng) * 1e3
            }).unwrap();
            prop_assert_eq!(read_tensor(&write_tensor(&t)).unwrap(), AnyTensor::Float(t));
        }
    }
}
