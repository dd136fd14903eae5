use std::fmt::Write as _;
use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Text,
}

pub enum Failure {
    /// Bad flags, unreadable or malformed input: exit 2.
    Usage(String),
    /// Computation failed with nothing worth printing: exit 1.
    Compute(String),
}

impl From<sawcount::Error> for Failure {
    fn from(e: sawcount::Error) -> Self {
        use sawcount::Error::*;
        match e {
            BudgetExceeded { .. } | Unconverged { .. } | StateCap { .. } => {
                Failure::Compute(e.to_string())
            }
            _ => Failure::Usage(e.to_string()),
        }
    }
}

pub struct Output {
    pub command: &'static str,
    pub config: Map<String, Value>,
    pub result: Value,
    /// Set when the computation stopped early; the result is still valid
    /// but incomplete.
    pub partial: Option<String>,
    pub default_format: Format,
    /// Replaces the whole text rendering, header included.
    pub text: Option<String>,
    /// Replaces the text rendering of the result below the header.
    pub body: Option<String>,
}

const SIG_DIGITS: usize = 12;

/// Round every float in `v` to 12 significant digits.
pub fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format!("{:.*e}", SIG_DIGITS - 1, x)
                .parse()
                .expect("formatted float");
            *v = serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

/// A float with 12 significant digits, fixed notation where readable.
pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if (-4..12).contains(&e) {
        let prec = (SIG_DIGITS as i32 - 1 - e).max(0) as usize;
        format!("{x:.prec$}")
    } else {
        format!("{:.*e}", SIG_DIGITS - 1, x)
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => sig(n.as_f64().expect("f64")),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Flatten nested objects into dotted keys.
fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        _ => out.push((prefix.to_string(), v.clone())),
    }
}

pub fn table(rows: &[Value]) -> String {
    let flat: Vec<Vec<(String, Value)>> = rows
        .iter()
        .map(|r| {
            let mut f = Vec::new();
            flatten("", r, &mut f);
            f
        })
        .collect();
    let mut cols: Vec<String> = Vec::new();
    for r in &flat {
        for (k, _) in r {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let cells: Vec<Vec<String>> = flat
        .iter()
        .map(|r| {
            cols.iter()
                .map(|c| {
                    r.iter()
                        .find(|(k, _)| k == c)
                        .map_or("-".into(), |(_, v)| scalar_or_list(v))
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| cells.iter().map(|r| r[i].len()).fold(c.len(), usize::max))
        .collect();
    let mut out = String::new();
    let line = |out: &mut String, row: &[String]| {
        let parts: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(s, &w)| format!("{s:>w$}"))
            .collect();
        let _ = writeln!(out, "{}", parts.join("  ").trim_end());
    };
    line(&mut out, &cols);
    for r in &cells {
        line(&mut out, r);
    }
    out
}

fn scalar_or_list(v: &Value) -> String {
    match v {
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(","),
        _ => scalar(v),
    }
}

fn render_text(result: &Value) -> String {
    let mut kv: Vec<(String, String)> = Vec::new();
    let mut tables: Vec<(String, String)> = Vec::new();
    let Value::Object(map) = result else {
        return format!("{}\n", scalar(result));
    };
    for (k, v) in map {
        match v {
            Value::Array(items) if !items.is_empty() && items.iter().all(Value::is_object) => {
                tables.push((k.clone(), table(items)));
            }
            Value::Object(_) => {
                let mut f = Vec::new();
                flatten(k, v, &mut f);
                kv.extend(f.into_iter().map(|(k, v)| (k, scalar_or_list(&v))));
            }
            _ => kv.push((k.clone(), scalar_or_list(v))),
        }
    }
    let w = kv.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in &kv {
        let _ = writeln!(out, "{k:<w$}  {v}");
    }
    for (name, t) in tables {
        if !out.is_empty() {
            out.push('\n');
        }
        let _ = writeln!(out, "[{name}]");
        out.push_str(&t);
    }
    out
}

impl Output {
    pub fn is_partial(&self) -> bool {
        self.partial.is_some()
    }

    fn envelope(&self) -> Value {
        let mut env = Map::new();
        env.insert("command".into(), Value::from(self.command));
        env.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        env.insert("config".into(), Value::Object(self.config.clone()));
        env.insert(
            "status".into(),
            Value::from(if self.partial.is_some() { "partial" } else { "ok" }),
        );
        if let Some(msg) = &self.partial {
            env.insert("message".into(), Value::from(msg.as_str()));
        }
        env.insert("result".into(), self.result.clone());
        let mut v = Value::Object(env);
        round_floats(&mut v);
        v
    }

    pub fn render(&self, format: Option<Format>) -> String {
        let env = self.envelope();
        match format.unwrap_or(self.default_format) {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&env).expect("serializable");
                s.push('\n');
                s
            }
            Format::Text => {
                if let Some(t) = &self.text {
                    return t.clone();
                }
                let mut out = format!("# sawcount {} {}\n", self.command, env!("CARGO_PKG_VERSION"));
                for (k, v) in &self.config {
                    let _ = writeln!(out, "# {k} = {}", scalar_or_list(v));
                }
                match &self.partial {
                    Some(msg) => {
                        let _ = writeln!(out, "# status = partial: {msg}");
                    }
                    None => out.push_str("# status = ok\n"),
                }
                match &self.body {
                    Some(b) => out.push_str(b),
                    None => out.push_str(&render_text(&env["result"])),
                }
                out
            }
        }
    }

    pub fn emit(&self, format: Option<Format>) -> io::Result<()> {
        let mut stdout = io::stdout().lock();
        stdout.write_all(self.render(format).as_bytes())?;
        stdout.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        let mut v = serde_json::json!({"a": 2.538621328914732, "b": [1.0, 1e-20 / 3.0], "n": 7});
        round_floats(&mut v);
        assert_eq!(v["a"], serde_json::json!(2.53862132891));
        assert_eq!(v["b"][1], serde_json::json!(3.33333333333e-21));
        assert_eq!(v["n"], serde_json::json!(7));
    }

    #[test]
    fn sig_formats() {
        assert_eq!(sig(3.0), "3.00000000000");
        assert_eq!(sig(0.5), "0.500000000000");
        assert_eq!(sig(1234.5), "1234.50000000");
        assert_eq!(sig(1e-7), "1.00000000000e-7");
        assert_eq!(sig(f64::INFINITY), "inf");
    }

    #[test]
    fn tables_align() {
        let rows = vec![
            serde_json::json!({"l": 1, "x": 0.5}),
            serde_json::json!({"l": 10, "x": 0.25}),
        ];
        let t = table(&rows);
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines.iter().all(|l| l.len() == lines[0].len()));
    }
}
