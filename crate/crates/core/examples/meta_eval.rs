//! Correlate two synthetic metrics with a synthetic human axis.

use std::collections::BTreeMap;

use fusebench::meta_eval::{correlation_table, kendall_tau_b, ScoreRecord, TableConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), fusebench::meta_eval::MetaEvalError> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let quality: Vec<f64> = (0..120).map(|_| rng.random()).collect();
    let record = |i: usize, value: f64| ScoreRecord { instance_id: format!("i{}", i / 3), system_id: format!("sys{}", i % 3), value };

    // Human ratings on a 1..7 scale; the "good" metric tracks quality, "weak" mostly noise.
    let human: Vec<ScoreRecord> = quality.iter().enumerate().map(|(i, q)| record(i, (1.0 + q * 6.0).round())).collect();
    let good: Vec<ScoreRecord> = quality.iter().enumerate().map(|(i, q)| record(i, q + rng.random_range(-0.1..0.1))).collect();
    let weak: Vec<ScoreRecord> = quality.iter().enumerate().map(|(i, q)| record(i, 0.2 * q + rng.random::<f64>())).collect();

    let xs: Vec<f64> = good.iter().map(|r| r.value).collect();
    let ys: Vec<f64> = human.iter().map(|r| r.value).collect();
    println!("full-sample tau-b (good): {:.4}", kendall_tau_b(&xs, &ys)?);

    let metrics = BTreeMap::from([("good".to_string(), good), ("weak".to_string(), weak)]);
    let humans = BTreeMap::from([("faithfulness".to_string(), human)]);
    let table = correlation_table(&metrics, &humans, &TableConfig::default())?;
    println!("{}", table.render_text());
    Ok(())
}
