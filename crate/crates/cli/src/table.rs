use serde_json::{Map, Number, Value};
use crate::CliError;

/// Significant digits kept in machine-readable output.
pub const SIGNIFICANT_DIGITS: usize = 15;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    /// Rendered as an empty CSV field and `null` in JSON.
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self { Cell::Num(x) }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self { Cell::Int(x) }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self { Cell::Int(x as u64) }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self { Cell::Text(s.into()) }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] and returns a JSON number.
pub fn number(x: f64) -> Result<Value, CliError> {
    if !x.is_finite() {
        return Err(CliError::Invariant(format!("non-finite value {x} in output")));
    }
    let rounded: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse()
        .map_err(|_| CliError::Invariant(format!("cannot round {x}")))?;
    // -0.0 would print as "-0.0"; normalize it away
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    Number::from_f64(rounded).map(Value::Number)
        .ok_or_else(|| CliError::Invariant(format!("cannot encode {x}")))
}

impl Cell {
    pub fn to_json(&self) -> Result<Value, CliError> {
        Ok(match self {
            Cell::Num(x) => number(*x)?,
            Cell::Int(n) => Value::from(*n),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        })
    }

    /// CSV text; numbers print exactly as their JSON form.
    pub fn to_csv(&self) -> Result<String, CliError> {
        Ok(match self {
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
            other => other.to_json()?.to_string(),
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Map<String, Value>,
}

impl Table {
    pub fn new<I, S>(columns: I) -> Self
    where I: IntoIterator<Item = S>, S: Into<String>
    {
        Self { columns: columns.into_iter().map(Into::into).collect(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<(), CliError> {
        if row.len() != self.columns.len() {
            return Err(CliError::Invariant(format!(
                "row has {} cells, table has {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Result<Vec<String>, CliError> = row.iter().map(Cell::to_csv).collect();
            out.push_str(&cells?.join(","));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn to_json(&self, config: Value) -> Result<String, CliError> {
        let rows = self.rows.iter()
            .map(|row| {
                let obj: Result<Map<String, Value>, CliError> = self.columns.iter().zip(row)
                    .map(|(c, v)| Ok((c.clone(), v.to_json()?)))
                    .collect();
                obj.map(Value::Object)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut top = Map::new();
        top.insert("config".into(), config);
        top.insert("rows".into(), Value::Array(rows));
        top.insert("summary".into(), Value::Object(self.summary.clone()));
        let mut text = serde_json::to_string_pretty(&Value::Object(top))
            .map_err(|e| CliError::Invariant(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }
}
