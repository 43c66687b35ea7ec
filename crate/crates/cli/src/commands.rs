use railconc::analytics::{
    compare_yield, entanglement_ratio, is_discrepant, yield_oracle, yield_term,
};
use railconc::protocols::{
    generate_entanglement, iterate_concentration, sample_heralds, sample_yield, swap_chain,
    swap_chain_closed_form, SingleRailPair, SourceParams, YieldEstimate,
};
use serde_json::Value;
use crate::config::RunConfig;
use crate::table::{number, Cell, Table};
use crate::CliError;

/// Tolerance of the simulated-versus-closed-form swap check.
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-12;

fn pair(alpha_sq: f64, theta: f64) -> Result<SingleRailPair, CliError> {
    Ok(SingleRailPair::from_alpha_sq(alpha_sq, theta, "a", "b")?)
}

fn discrepancy_label(flagged: bool) -> Cell {
    if flagged { "documented".into() } else { "none".into() }
}

/// A finished table plus any closed-form checks that failed.
pub struct Outcome {
    pub table: Table,
    pub failed_checks: Vec<String>,
}

pub fn generate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut columns = vec!["p_a", "p_b", "herald_prob", "alpha_sq", "beta_sq", "phase"];
    if cfg.trials > 0 {
        columns.extend(["click_prob", "mc_click_freq", "mc_stderr"]);
    }
    let mut table = Table::new(columns);
    let mut first_order = true;
    let mut index = 0u64;
    for &p_a in &cfg.p_a {
        for &p_b in &cfg.p_b {
            let params = SourceParams::new(p_a, p_b, cfg.theta_ab)
                .map_err(|e| CliError::Config(e.to_string()))?;
            let g = generate_entanglement(&params)?;
            first_order &= g.first_order_valid;
            let mut row: Vec<Cell> = vec![
                p_a.into(), p_b.into(), g.herald_probability.into(),
                g.pair.alpha_sq().into(), g.pair.beta_sq().into(), g.pair.theta().into(),
            ];
            if cfg.trials > 0 {
                let mc = sample_heralds(&g, cfg.trials, cfg.seed.wrapping_add(index))?;
                row.extend([g.click_probability.into(), mc.frequency.into(), mc.stderr.into()]);
            }
            table.push(row)?;
            index += 1;
        }
    }
    table.summary.insert("points".into(), Value::from(index));
    table.summary.insert("first_order_valid".into(), Value::from(first_order));
    Ok(Outcome { table, failed_checks: Vec::new() })
}

pub fn swap_chain_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new(["alpha_sq", "n", "alpha_n_sq", "entanglement_ratio", "closed_form_check"]);
    let mut failed = Vec::new();
    for &x in &cfg.alpha_sq {
        let p = pair(x, cfg.theta_ab)?;
        for n in 1..=cfg.swap_depth {
            let simulated = swap_chain(&p, n)?;
            let closed = swap_chain_closed_form(&p, n)?;
            let pass = simulated.same_coefficients(&closed, CLOSED_FORM_TOLERANCE);
            if !pass {
                failed.push(format!("swap chain alpha_sq={x} n={n}"));
            }
            table.push(vec![
                x.into(), n.into(), simulated.alpha_sq().into(),
                entanglement_ratio(&simulated).into(),
                if pass { "pass".into() } else { "fail".into() },
            ])?;
        }
    }
    table.summary.insert("checks".into(), Value::from(table.rows.len()));
    table.summary.insert("all_pass".into(), Value::from(failed.is_empty()));
    Ok(Outcome { table, failed_checks: failed })
}

/// Standard error of the pooled per-source-pair yield. A lineage succeeds in
/// at most one round, so the per-lineage payoff is `2^-k` on success in round `k`.
fn pooled_stderr(estimates: &[YieldEstimate], trials: u64) -> f64 {
    let t = trials as f64;
    let (mut mean, mut second) = (0.0, 0.0);
    for e in estimates {
        let w = 2f64.powi(e.round as i32);
        let f = e.successes as f64 / t;
        mean += f / w;
        second += f / (w * w);
    }
    ((second - mean * mean).max(0.0) / t).sqrt()
}

pub fn concentrate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mc = cfg.trials > 0;
    let mut columns = vec!["alpha_sq", "n", "success_probability", "y_formula", "y_oracle", "discrepancy"];
    if mc {
        columns.extend(["mc_estimate", "mc_stderr"]);
    }
    columns.push("cumulative");
    let mut table = Table::new(columns);
    let mut failed = Vec::new();
    let mut documented = 0usize;
    for (i, &x) in cfg.alpha_sq.iter().enumerate() {
        let p = pair(x, cfg.theta_ab)?;
        let ledger = iterate_concentration(&p, cfg.rounds, cfg.qnd_theta)?;
        let exact: Vec<f64> = if cfg.parity_qnd() {
            yield_oracle(p.alpha(), p.beta(), cfg.rounds)?
        } else {
            ledger.entries.iter().map(|e| e.yield_per_source_pair).collect()
        };
        let first = ledger.entries[0].success_probability;
        if (first - 2.0 * p.alpha_sq() * p.beta_sq()).abs() > CLOSED_FORM_TOLERANCE {
            failed.push(format!("round-1 success probability alpha_sq={x}"));
        }
        let sampled = if mc {
            Some(sample_yield(&p, cfg.rounds, cfg.qnd_theta, cfg.trials, cfg.seed.wrapping_add(i as u64))?)
        } else {
            None
        };
        let (mut sum_formula, mut cumulative, mut any_flag) = (0.0, 0.0, false);
        for (k, entry) in ledger.entries.iter().enumerate() {
            let n = k + 1;
            let formula = yield_term(p.alpha(), p.beta(), n)?;
            let flagged = is_discrepant(formula, exact[k]);
            if flagged && n == 1 {
                failed.push(format!("first-round yield alpha_sq={x}"));
            }
            documented += usize::from(flagged);
            any_flag |= flagged;
            sum_formula += formula;
            cumulative += exact[k];
            let mut row: Vec<Cell> = vec![
                x.into(), n.into(), entry.success_probability.into(),
                formula.into(), exact[k].into(), discrepancy_label(flagged),
            ];
            if let Some(s) = &sampled {
                row.extend([s[k].estimate.into(), s[k].stderr.into()]);
            }
            row.push(cumulative.into());
            table.push(row)?;
        }
        let mut footer: Vec<Cell> = vec![
            x.into(), "total".into(), Cell::Empty,
            sum_formula.into(), cumulative.into(), discrepancy_label(any_flag),
        ];
        if let Some(s) = &sampled {
            let total: f64 = s.iter().map(|e| e.estimate).sum();
            footer.extend([total.into(), pooled_stderr(s, cfg.trials).into()]);
        }
        footer.push(cumulative.into());
        table.push(footer)?;
    }
    table.summary.insert("documented_discrepancies".into(), Value::from(documented));
    table.summary.insert("exact_source".into(),
        Value::from(if cfg.parity_qnd() { "herald-tree oracle" } else { "round ledger" }));
    table.summary.insert("checks_pass".into(), Value::from(failed.is_empty()));
    Ok(Outcome { table, failed_checks: failed })
}

pub fn yield_table(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut table = Table::new([
        "alpha_sq", "n", "y_formula", "y_oracle", "abs_discrepancy", "relative_discrepancy",
        "discrepancy", "cumulative_formula", "cumulative_oracle",
    ]);
    let mut failed = Vec::new();
    let mut documented = 0usize;
    let mut cumulative_gain = true;
    for &x in &cfg.alpha_sq {
        let p = pair(x, 0.0)?;
        let report = compare_yield(p.alpha(), p.beta(), cfg.rounds, 0, cfg.seed)?;
        let (mut cf, mut co) = (0.0, 0.0);
        for t in &report.terms {
            if t.documented_discrepancy && t.n == 1 {
                failed.push(format!("first-round yield alpha_sq={x}"));
            }
            documented += usize::from(t.documented_discrepancy);
            cf += t.value;
            co += t.oracle_value;
            table.push(vec![
                x.into(), t.n.into(), t.value.into(), t.oracle_value.into(),
                t.discrepancy.into(), t.relative_discrepancy.into(),
                discrepancy_label(t.documented_discrepancy), cf.into(), co.into(),
            ])?;
        }
        if cfg.rounds > 1 && (x - 0.5).abs() > 1e-15 {
            cumulative_gain &= report.cumulative_oracle > report.terms[0].oracle_value;
        }
    }
    table.summary.insert("documented_discrepancies".into(), Value::from(documented));
    table.summary.insert("cumulative_exceeds_first_round".into(), Value::from(cumulative_gain));
    table.summary.insert("checks_pass".into(), Value::from(failed.is_empty()));
    Ok(Outcome { table, failed_checks: failed })
}

/// The resolved configuration as it appears in JSON output.
pub fn config_value(command: &str, cfg: &RunConfig) -> Result<Value, CliError> {
    let mut map = serde_json::Map::new();
    map.insert("command".into(), Value::from(command));
    let alpha: Result<Vec<Value>, CliError> = cfg.alpha_sq.iter().map(|&x| number(x)).collect();
    map.insert("alpha_sq".into(), Value::Array(alpha?));
    map.insert("theta_ab".into(), number(cfg.theta_ab)?);
    map.insert("qnd_theta".into(), number(cfg.qnd_theta)?);
    map.insert("rounds".into(), Value::from(cfg.rounds));
    map.insert("swap_depth".into(), Value::from(cfg.swap_depth));
    let p_a: Result<Vec<Value>, CliError> = cfg.p_a.iter().map(|&x| number(x)).collect();
    let p_b: Result<Vec<Value>, CliError> = cfg.p_b.iter().map(|&x| number(x)).collect();
    map.insert("p_a".into(), Value::Array(p_a?));
    map.insert("p_b".into(), Value::Array(p_b?));
    map.insert("trials".into(), Value::from(cfg.trials));
    map.insert("seed".into(), Value::from(cfg.seed));
    Ok(Value::Object(map))
}
