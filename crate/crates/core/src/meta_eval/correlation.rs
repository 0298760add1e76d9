use serde::{Deserialize, Serialize};

use super::MetaEvalError;

/// Kendall variant. Tau-b corrects for ties and is the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauVariant {
    A,
    #[default]
    B,
}

fn check(x: &[f64], y: &[f64]) -> Result<(), MetaEvalError> {
    if x.len() != y.len() {
        return Err(MetaEvalError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(MetaEvalError::TooShort(x.len()));
    }
    Ok(())
}

/// Pair counts over all `i < j`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    /// Tied in x only.
    pub ties_x: u64,
    /// Tied in y only.
    pub ties_y: u64,
    /// Tied in both.
    pub ties_xy: u64,
}

pub fn pair_counts(x: &[f64], y: &[f64]) -> PairCounts {
    let mut c = PairCounts::default();
    for i in 0..x.len() {
        for j in (i + 1)..x.len() {
            let dx = x[i].partial_cmp(&x[j]).unwrap_or(std::cmp::Ordering::Equal);
            let dy = y[i].partial_cmp(&y[j]).unwrap_or(std::cmp::Ordering::Equal);
            use std::cmp::Ordering::Equal;
            match (dx, dy) {
                (Equal, Equal) => c.ties_xy += 1,
                (Equal, _) => c.ties_x += 1,
                (_, Equal) => c.ties_y += 1,
                (a, b) if a == b => c.concordant += 1,
                _ => c.discordant += 1,
            }
        }
    }
    c
}

/// `(C - D) / sqrt((C + D + Tx)(C + D + Ty))`; 0 when either factor is 0.
pub fn kendall_tau_b(x: &[f64], y: &[f64]) -> Result<f64, MetaEvalError> {
    check(x, y)?;
    let c = pair_counts(x, y);
    let cd = (c.concordant + c.discordant) as f64;
    let den = ((cd + c.ties_x as f64) * (cd + c.ties_y as f64)).sqrt();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok((c.concordant as f64 - c.discordant as f64) / den)
}

/// `(C - D) / (n (n - 1) / 2)`.
pub fn kendall_tau_a(x: &[f64], y: &[f64]) -> Result<f64, MetaEvalError> {
    check(x, y)?;
    let c = pair_counts(x, y);
    let n = x.len() as f64;
    Ok((c.concordant as f64 - c.discordant as f64) / (n * (n - 1.0) / 2.0))
}

pub fn kendall_tau(x: &[f64], y: &[f64], variant: TauVariant) -> Result<f64, MetaEvalError> {
    match variant {
        TauVariant::A => kendall_tau_a(x, y),
        TauVariant::B => kendall_tau_b(x, y),
    }
}

/// 1-based ranks; ties share the average of the ranks they span.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Pearson correlation, or `None` when either series has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Spearman's rho with its zero-variance flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rho {
    pub value: f64,
    pub zero_variance: bool,
}

/// Pearson correlation of mid-ranks. Zero variance yields 0 and sets the flag.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Rho, MetaEvalError> {
    check(x, y)?;
    Ok(match pearson(&mid_ranks(x), &mid_ranks(y)) {
        Some(value) => Rho { value, zero_variance: false },
        None => {
            tracing::warn!("spearman correlation over a constant series; reporting 0");
            Rho { value: 0.0, zero_variance: true }
        }
    })
}

pub fn spearman_rho(x: &[f64], y: &[f64]) -> Result<f64, MetaEvalError> {
    spearman(x, y).map(|r| r.value)
}

pub fn has_variance(values: &[f64]) -> bool {
    values.windows(2).any(|w| w[0] != w[1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kendall_examples() {
        assert_eq!(kendall_tau_b(&[1., 2., 3., 4.], &[1., 2., 3., 4.]).unwrap(), 1.0);
        assert_eq!(kendall_tau_b(&[1., 2., 3., 4.], &[4., 3., 2., 1.]).unwrap(), -1.0);
        let t = kendall_tau_b(&[1., 2., 3., 4.], &[1., 3., 2., 4.]).unwrap();
        assert!((t - 4.0 / 6.0).abs() < 1e-12);
        assert_eq!(kendall_tau_a(&[1., 2., 3., 4.], &[1., 3., 2., 4.]).unwrap(), t);
        assert_eq!(kendall_tau_b(&[1., 1., 1.], &[1., 2., 3.]).unwrap(), 0.0);
        assert!(matches!(kendall_tau_b(&[1.], &[1.]), Err(MetaEvalError::TooShort(1))));
        assert!(matches!(kendall_tau_b(&[1., 2.], &[1.]), Err(MetaEvalError::LengthMismatch { .. })));
    }

    #[test]
    fn spearman_examples() {
        assert_eq!(spearman_rho(&[1., 2., 3.], &[10., 20., 30.]).unwrap(), 1.0);
        assert!((spearman_rho(&[1., 2., 3.], &[3., 1., 2.]).unwrap() + 0.5).abs() < 1e-12);
        let rho = spearman(&[1., 2., 3.], &[5., 5., 5.]).unwrap();
        assert_eq!(rho, Rho { value: 0.0, zero_variance: true });
    }

    #[test]
    fn mid_ranks_average_ties() {
        assert_eq!(mid_ranks(&[10., 20., 10., 30.]), vec![1.5, 3.0, 1.5, 4.0]);
    }
}
