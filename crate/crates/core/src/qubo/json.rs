//! `{ "num_vars", "linear": [[i, v]], "quadratic": [[i, j, v]], "offset", "var_names"? }`

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Qubo, QuboError};

#[derive(Serialize, Deserialize)]
struct QuboDoc {
    num_vars: usize,
    linear: Vec<(usize, f64)>,
    quadratic: Vec<(usize, usize, f64)>,
    offset: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    var_names: Option<Vec<(usize, String)>>,
}

impl From<&Qubo> for QuboDoc {
    fn from(q: &Qubo) -> Self {
        QuboDoc {
            num_vars: q.num_vars,
            linear: q.linear.iter().map(|(&i, &v)| (i, v)).collect(),
            quadratic: q.quadratic.iter().map(|(&(i, j), &v)| (i, j, v)).collect(),
            offset: q.offset,
            var_names: q
                .var_names
                .as_ref()
                .map(|m| m.iter().map(|(&i, s)| (i, s.clone())).collect()),
        }
    }
}

impl TryFrom<QuboDoc> for Qubo {
    type Error = QuboError;

    fn try_from(doc: QuboDoc) -> Result<Self, QuboError> {
        let q = Qubo::new(
            doc.num_vars,
            doc.linear,
            doc.quadratic.into_iter().map(|(i, j, v)| ((i, j), v)),
            doc.offset,
        )?;
        match doc.var_names {
            Some(names) => q.with_var_names(names.into_iter().collect::<BTreeMap<_, _>>()),
            None => Ok(q),
        }
    }
}

impl Serialize for Qubo {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        QuboDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Qubo {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = QuboDoc::deserialize(deserializer)?;
        Qubo::try_from(doc).map_err(serde::de::Error::custom)
    }
}
