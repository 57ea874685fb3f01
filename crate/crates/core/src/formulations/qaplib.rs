//! QAPLIB plain-text instances.

use super::{FormulationError, QapInstance, Result};

/// Parses `n`, then the `n×n` flow matrix `T`, then the `n×n` distance
/// matrix `C`, all whitespace separated.
pub fn parse_qaplib(text: &str) -> Result<QapInstance> {
    let mut tokens = text.split_whitespace();
    let head = tokens.next().ok_or(FormulationError::Truncated {
        expected: 1,
        found: 0,
    })?;
    let n: usize = head
        .parse()
        .map_err(|_| FormulationError::NonNumeric(head.to_string()))?;
    if n == 0 {
        return Err(FormulationError::SizeMismatch("n must be positive".into()));
    }
    let expected = 2 * n * n;
    let mut values = Vec::with_capacity(expected);
    for tok in tokens.by_ref().take(expected) {
        let v: f64 = tok
            .parse()
            .map_err(|_| FormulationError::NonNumeric(tok.to_string()))?;
        values.push(v);
    }
    if values.len() < expected {
        return Err(FormulationError::Truncated {
            expected,
            found: values.len(),
        });
    }
    let extra = tokens.count();
    if extra > 0 {
        return Err(FormulationError::SizeMismatch(format!(
            "{extra} tokens after the two {n}x{n} matrices"
        )));
    }
    let matrix =
        |chunk: &[f64]| -> Vec<Vec<f64>> { chunk.chunks(n).map(<[f64]>::to_vec).collect() };
    let flow = matrix(&values[..n * n]);
    let cost = matrix(&values[n * n..]);
    QapInstance::new(cost, flow)
}
