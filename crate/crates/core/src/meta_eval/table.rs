use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::bootstrap::{bootstrap_correlation, BootstrapConfig, CorrelationMethod, CorrelationResult, PairedSeries};
use super::MetaEvalError;
use crate::table::TextTable;

/// One scored output, as read from metric and human score files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub instance_id: String,
    pub system_id: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableConfig {
    pub method: CorrelationMethod,
    pub bootstrap: BootstrapConfig,
}

impl Default for TableConfig {
    fn default() -> Self {
        TableConfig { method: CorrelationMethod::KendallTauB, bootstrap: BootstrapConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub result: CorrelationResult,
    /// Highest bootstrap mean for this axis.
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRow {
    pub metric: String,
    pub cells: BTreeMap<String, TableCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationTable {
    pub axes: Vec<String>,
    pub rows: Vec<CorrelationRow>,
}

type Key = (String, String);

fn index(records: &[ScoreRecord], what: &str) -> Result<BTreeMap<Key, f64>, MetaEvalError> {
    let mut map = BTreeMap::new();
    for r in records {
        if map.insert((r.instance_id.clone(), r.system_id.clone()), r.value).is_some() {
            return Err(MetaEvalError::DuplicateRecord(format!("{what}: ({}, {})", r.instance_id, r.system_id)));
        }
    }
    Ok(map)
}

/// Correlates every metric with every human axis.
///
/// Series are aligned on `(instance_id, system_id)` and ordered by that key, so
/// input order does not matter. Each metric must score every output the axis
/// has a human score for.
pub fn correlation_table(
    metrics: &BTreeMap<String, Vec<ScoreRecord>>,
    human: &BTreeMap<String, Vec<ScoreRecord>>,
    config: &TableConfig,
) -> Result<CorrelationTable, MetaEvalError> {
    let axes: Vec<String> = human.keys().cloned().collect();
    let metric_maps: BTreeMap<&String, BTreeMap<Key, f64>> =
        metrics.iter().map(|(name, recs)| Ok((name, index(recs, name)?))).collect::<Result<_, MetaEvalError>>()?;
    let mut rows: Vec<CorrelationRow> =
        metrics.keys().map(|m| CorrelationRow { metric: m.clone(), cells: BTreeMap::new() }).collect();
    for (axis, records) in human {
        let human_map = index(records, axis)?;
        for row in rows.iter_mut() {
            let metric_map = &metric_maps[&row.metric];
            let mut xs = Vec::with_capacity(human_map.len());
            let mut ys = Vec::with_capacity(human_map.len());
            let mut labels = Vec::with_capacity(human_map.len());
            for (key, h) in &human_map {
                let m = metric_map.get(key).ok_or_else(|| MetaEvalError::MissingSeries {
                    metric: row.metric.clone(),
                    instance_id: key.0.clone(),
                    system_id: key.1.clone(),
                })?;
                xs.push(*m);
                ys.push(*h);
                labels.push(format!("{}/{}", key.0, key.1));
            }
            let series = PairedSeries::new(xs, ys, labels)?;
            let result = bootstrap_correlation(&series, config.method, config.bootstrap)?;
            row.cells.insert(axis.clone(), TableCell { result, best: false });
        }
        let best = rows
            .iter()
            .map(|r| r.cells[axis].result.bootstrap_mean)
            .fold(f64::NEG_INFINITY, f64::max);
        for row in rows.iter_mut() {
            let cell = row.cells.get_mut(axis).expect("cell inserted above");
            cell.best = cell.result.bootstrap_mean == best;
        }
    }
    Ok(CorrelationTable { axes, rows })
}

impl CorrelationTable {
    /// Aligned text: per axis a mean column and a 95% CI column; `*` marks the best.
    pub fn render_text(&self) -> String {
        let mut headers = vec!["Metric".to_string()];
        for axis in &self.axes {
            headers.push(format!("{axis} tau"));
            headers.push("95% CI".to_string());
        }
        let mut table = TextTable::new(headers);
        for row in &self.rows {
            let mut cells = vec![row.metric.clone()];
            for axis in &self.axes {
                let cell = &row.cells[axis];
                let mark = if cell.best { "*" } else { "" };
                cells.push(format!("{mark}{:.4}", cell.result.bootstrap_mean));
                cells.push(format!("[{:.2}, {:.2}]", cell.result.ci_low, cell.result.ci_high));
            }
            table.push(cells);
        }
        table.render()
    }

    pub fn metric_names(&self) -> BTreeSet<&str> {
        self.rows.iter().map(|r| r.metric.as_str()).collect()
    }
}
