//! JSON tables of polynomial forms:
//! `{"degree": k, "components": {"1,2": [[coeff, [exponents]], …]}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Component, FormField, Poly};
use crate::error::{ChainletError, Result};
use crate::exterior::Blade;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    /// Ambient dimension; inferred from the exponent vectors when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub degree: usize,
    pub components: BTreeMap<String, Vec<(f64, Vec<u32>)>>,
}

impl FormJson {
    pub fn parse(s: &str) -> Result<FormJson> {
        serde_json::from_str(s).map_err(|e| ChainletError::Invalid(e.to_string()))
    }

    pub fn to_form<S: Scalar>(&self) -> Result<FormField<S>> {
        let n = match self.n {
            Some(n) => n,
            None => self
                .components
                .values()
                .flatten()
                .map(|(_, e)| e.len())
                .next()
                .ok_or_else(|| ChainletError::Invalid("cannot infer the dimension of an empty form".into()))?,
        };
        let mut f = FormField::zero(n, self.degree)?;
        for (key, terms) in &self.components {
            let blade = Blade::parse(key).ok_or_else(|| ChainletError::Invalid(format!("bad component key `{key}`")))?;
            if blade.grade() != self.degree || !blade.fits(n) {
                return Err(ChainletError::Invalid(format!("component `{key}` does not fit a {}-form on R^{n}", self.degree)));
            }
            if let Some((_, e)) = terms.iter().find(|(_, e)| e.len() != n) {
                return Err(ChainletError::DimensionMismatch { expected: n, found: e.len() });
            }
            let p = Poly::from_terms(n, terms.iter().map(|(c, e)| (S::lit(*c), e.clone())));
            f = f.with_component(blade, Component::Poly(p))?;
        }
        Ok(f)
    }

    /// Table of a form with polynomial components; `None` otherwise.
    pub fn from_form<S: Scalar>(form: &FormField<S>) -> Option<FormJson> {
        let mut components = BTreeMap::new();
        for (b, c) in form.components() {
            let Component::Poly(p) = c else { return None };
            components.insert(b.key(), p.terms().map(|(e, c)| (c.as_f64(), e.to_vec())).collect());
        }
        Some(FormJson { n: Some(form.ambient()), degree: form.degree(), components })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exterior::KVector;

    #[test]
    fn parse_x_dy() {
        let j = FormJson::parse(r#"{"degree":1,"components":{"2":[[1.0,[1,0]]]}}"#).unwrap();
        let f: FormField<f64> = j.to_form().unwrap();
        assert_eq!(f.eval(&[2.0, 0.0], &KVector::basis(2, &[1]).unwrap()), 2.0);
        assert_eq!(FormJson::from_form(&f).unwrap().to_form::<f64>().unwrap().eval(&[3.0, 1.0], &KVector::basis(2, &[1]).unwrap()), 3.0);
    }

    #[test]
    fn bad_key_is_rejected() {
        let j = FormJson::parse(r#"{"degree":1,"components":{"1,2":[[1.0,[1,0]]]}}"#).unwrap();
        assert!(j.to_form::<f64>().is_err());
    }
}
