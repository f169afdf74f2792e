use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace has no samples")]
    Empty,
    #[error("timestamps must be strictly increasing (row {row})")]
    NotIncreasing { row: usize },
    #[error("timestamp {time} at row {row} is negative or not finite")]
    BadTime { row: usize, time: f64 },
    #[error("signal '{name}' has {got} samples, expected {expected}")]
    LengthMismatch {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("non-finite or unparsable value {value:?} in column '{column}' at row {row}")]
    BadValue {
        row: usize,
        column: String,
        value: String,
    },
    #[error("bad CSV header: {0}")]
    Header(String),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Finite, sampled multi-signal trace over strictly increasing timestamps.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    timestamps: Vec<f64>,
    signals: BTreeMap<String, Vec<f64>>,
}

impl Trace {
    pub fn new(
        timestamps: Vec<f64>,
        signals: impl IntoIterator<Item = (String, Vec<f64>)>,
    ) -> Result<Self, TraceError> {
        if timestamps.is_empty() {
            return Err(TraceError::Empty);
        }
        for (row, &t) in timestamps.iter().enumerate() {
            if !t.is_finite() || t < 0.0 {
                return Err(TraceError::BadTime { row: row + 1, time: t });
            }
            if row > 0 && t <= timestamps[row - 1] {
                return Err(TraceError::NotIncreasing { row: row + 1 });
            }
        }
        let signals: BTreeMap<String, Vec<f64>> = signals.into_iter().collect();
        for (name, values) in &signals {
            if values.len() != timestamps.len() {
                return Err(TraceError::LengthMismatch {
                    name: name.clone(),
                    got: values.len(),
                    expected: timestamps.len(),
                });
            }
            if let Some((row, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(TraceError::BadValue {
                    row: row + 1,
                    column: name.clone(),
                    value: v.to_string(),
                });
            }
        }
        Ok(Self { timestamps, signals })
    }

    /// Convenience constructor from borrowed names.
    pub fn from_columns(timestamps: &[f64], columns: &[(&str, &[f64])]) -> Result<Self, TraceError> {
        Self::new(
            timestamps.to_vec(),
            columns.iter().map(|(n, v)| (n.to_string(), v.to_vec())),
        )
    }

    pub fn timestamps(&self) -> &[f64] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    /// Last timestamp.
    pub fn horizon(&self) -> f64 {
        *self.timestamps.last().expect("trace is non-empty")
    }

    pub fn signal(&self, name: &str) -> Option<&[f64]> {
        self.signals.get(name).map(Vec::as_slice)
    }

    pub fn signal_names(&self) -> impl Iterator<Item = &str> {
        self.signals.keys().map(String::as_str)
    }

    /// Index of the sample taken exactly at `t`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.timestamps.iter().position(|&s| s == t)
    }

    /// Parses `time,var1,var2,...` CSV text.
    pub fn from_csv_str(text: &str) -> Result<Self, TraceError> {
        Self::from_csv_reader(text.as_bytes())
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self, TraceError> {
        let file = std::fs::File::open(path)?;
        Self::from_csv_reader(file)
    }

    fn from_csv_reader<R: std::io::Read>(reader: R) -> Result<Self, TraceError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.get(0) != Some("time") {
            return Err(TraceError::Header("first column must be 'time'".into()));
        }
        let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() || names[..i].contains(n) {
                return Err(TraceError::Header(format!("empty or duplicate column '{n}'")));
            }
        }

        let mut times = Vec::new();
        let mut columns = vec![Vec::new(); names.len()];
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let row = row + 1;
            let cell = |i: usize, column: &str| -> Result<f64, TraceError> {
                let raw = record.get(i).unwrap_or("");
                raw.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| TraceError::BadValue {
                        row,
                        column: column.to_string(),
                        value: raw.to_string(),
                    })
            };
            times.push(cell(0, "time")?);
            for (i, name) in names.iter().enumerate() {
                columns[i].push(cell(i + 1, name)?);
            }
        }
        Self::new(times, names.into_iter().zip(columns))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip_values() {
        let t = Trace::from_csv_str("time,speed,rpm\n0,60,4000\n1.5,40,2500\n").unwrap();
        assert_eq!(t.timestamps(), &[0.0, 1.5]);
        assert_eq!(t.signal("rpm"), Some(&[4000.0, 2500.0][..]));
        assert_eq!(t.horizon(), 1.5);
        assert_eq!(t.signal_names().collect::<Vec<_>>(), ["rpm", "speed"]);
    }

    #[test]
    fn rejects_nan_inf_and_bad_order() {
        assert!(matches!(
            Trace::from_csv_str("time,x\n0,NaN\n"),
            Err(TraceError::BadValue { .. })
        ));
        assert!(matches!(
            Trace::from_csv_str("time,x\n0,inf\n"),
            Err(TraceError::BadValue { .. })
        ));
        assert!(matches!(
            Trace::from_csv_str("time,x\n0,1\n0,2\n"),
            Err(TraceError::NotIncreasing { row: 2 })
        ));
        assert!(matches!(Trace::from_csv_str("time,x\n"), Err(TraceError::Empty)));
        assert!(matches!(Trace::from_csv_str("t,x\n0,1\n"), Err(TraceError::Header(_))));
        assert!(matches!(
            Trace::from_csv_str("time,x,x\n0,1,1\n"),
            Err(TraceError::Header(_))
        ));
    }

    #[test]
    fn length_mismatch() {
        let err = Trace::from_columns(&[0.0, 1.0], &[("x", &[1.0])]).unwrap_err();
        assert!(matches!(err, TraceError::LengthMismatch { .. }));
    }
}
