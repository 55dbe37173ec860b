use serde::Serialize;
use serde_json::Value;

use super::exact::ExactResult;
use super::monte_carlo::RunStats;
use crate::states::IdentityReport;

/// CSV columns of `wqsc run --format csv`.
pub const RUN_STATS_COLUMNS: [&str; 18] = [
    "scheme",
    "attack",
    "seed",
    "rounds_total",
    "check_rounds",
    "check_errors",
    "error_rate",
    "error_rate_ci95_low",
    "error_rate_ci95_high",
    "z",
    "message_rounds",
    "recovery_accuracy",
    "eve_guesses",
    "eve_correct",
    "eve_leak_rate",
    "unknown_fraction",
    "threshold",
    "exceeds_threshold",
];

/// CSV columns of `wqsc identities --format csv`.
pub const IDENTITY_COLUMNS: [&str; 9] = [
    "id",
    "left",
    "right",
    "max_deviation",
    "pass",
    "written_norm_left",
    "written_norm_right",
    "alternate_right",
    "alternate_max_deviation",
];

/// Rounds to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn num(x: f64) -> String {
    round_sig(x).to_string()
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().expect("f64"));
            *v = serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut v = serde_json::to_value(value).expect("serializable");
    round_floats(&mut v);
    serde_json::to_string_pretty(&v).expect("serializable") + "\n"
}

fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn stats_to_json(stats: &RunStats) -> String {
    to_json(stats)
}

pub fn stats_to_csv(s: &RunStats) -> String {
    let row = vec![
        s.scheme.to_string(),
        s.attack.to_string(),
        s.seed.to_string(),
        s.rounds_total.to_string(),
        s.check_rounds.to_string(),
        s.check_errors.to_string(),
        num(s.error_rate),
        num(s.error_rate_ci95[0]),
        num(s.error_rate_ci95[1]),
        num(s.z),
        s.message_rounds.to_string(),
        opt(s.recovery_accuracy, num),
        s.eve_guesses.to_string(),
        s.eve_correct.to_string(),
        opt(s.eve_leak_rate, num),
        opt(s.unknown_fraction, num),
        opt(s.threshold, num),
        opt(s.exceeds_threshold, |b| b.to_string()),
    ];
    to_csv(&RUN_STATS_COLUMNS, &[row])
}

pub fn exact_to_json(result: &ExactResult) -> String {
    to_json(result)
}

/// Long format: one `scheme,attack,metric,value` row per quantity.
pub fn exact_to_csv(r: &ExactResult) -> String {
    let mut metrics = vec![("total_error_rate".to_string(), num(r.total_error_rate))];
    for (k, v) in &r.conditional_error_rates {
        metrics.push((format!("conditional_error_rate[{k}]"), num(*v)));
    }
    for (k, v) in &r.condition_weights {
        metrics.push((format!("condition_weight[{k}]"), num(*v)));
    }
    metrics.push(("recovery_accuracy".into(), num(r.recovery_accuracy)));
    metrics.push(("leak_rate".into(), opt(r.leak_rate, num)));
    for (k, v) in &r.conditional_leak_rates {
        metrics.push((format!("conditional_leak_rate[{k}]"), opt(*v, num)));
    }
    metrics.push(("unknown_fraction".into(), num(r.unknown_fraction)));
    let rows: Vec<Vec<String>> = metrics
        .into_iter()
        .map(|(m, v)| vec![r.scheme.to_string(), r.attack.to_string(), m, v])
        .collect();
    to_csv(&["scheme", "attack", "metric", "value"], &rows)
}

pub fn identities_to_json(reports: &[IdentityReport]) -> String {
    to_json(&reports)
}

pub fn identities_to_csv(reports: &[IdentityReport]) -> String {
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.id.clone(),
                r.left.clone(),
                r.right.clone(),
                num(r.max_deviation),
                r.pass.to_string(),
                num(r.written_norms[0]),
                num(r.written_norms[1]),
                opt(r.alternate.as_ref(), |a| a.right.clone()),
                opt(r.alternate.as_ref(), |a| num(a.max_deviation)),
            ]
        })
        .collect();
    to_csv(&IDENTITY_COLUMNS, &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round_sig(1.0 / 12.0), 0.0833333333333);
        assert_eq!(round_sig(0.25), 0.25);
        assert_eq!(round_sig(2.0 / 3.0), 0.666666666667);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(round_sig(0.2499999999999999), 0.25);
    }

    #[test]
    fn json_floats_rounded() {
        let s = to_json(&serde_json::json!({"a": 1.0 / 3.0, "n": 7, "v": [0.1 + 0.2]}));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["a"], 0.333333333333);
        assert_eq!(v["n"], 7);
        assert_eq!(v["v"][0], 0.3);
    }
}
