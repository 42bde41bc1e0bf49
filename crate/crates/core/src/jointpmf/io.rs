//! JSON and CSV forms of a joint distribution.
//!
//! JSON: `{"cardinalities":[...],"probs":[...]}` with `probs` row-major,
//! last variable fastest. CSV: one row per joint state, one column per
//! variable holding its state index, then the probability.

use std::io::{Read, Write};
use std::path::Path;

use super::JointPmf;
use crate::error::{Error, Result};

impl JointPmf {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("joint pmf serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read_json<R: Read>(reader: R) -> Result<Self> {
        Ok(serde_json::from_reader(reader)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_json(std::io::BufReader::new(file))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Writes the joint table; probabilities carry 17 significant digits.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (0..self.num_vars()).map(|v| format!("x{v}")).collect();
        header.push("prob".into());
        out.write_record(&header)?;
        for (i, p) in self.probs().iter().enumerate() {
            let mut record: Vec<String> = self.state_of(i).iter().map(|s| s.to_string()).collect();
            record.push(format!("{p:.16e}"));
            out.write_record(&record)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Reads a table written by [`JointPmf::write_csv`]. Every joint state
    /// must appear exactly once.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let width = input.headers()?.len();
        if width < 2 {
            return Err(Error::InvalidProbabilities("csv needs state columns and a prob column".into()));
        }
        let mut rows: Vec<(Vec<usize>, f64)> = Vec::new();
        for record in input.records() {
            let record = record?;
            let parse_err = |field: &str| Error::InvalidProbabilities(format!("unparsable csv field {field:?}"));
            let mut state = Vec::with_capacity(width - 1);
            for field in record.iter().take(width - 1) {
                state.push(field.trim().parse::<usize>().map_err(|_| parse_err(field))?);
            }
            let field = record.get(width - 1).unwrap_or("");
            let p = field.trim().parse::<f64>().map_err(|_| parse_err(field))?;
            rows.push((state, p));
        }
        let cardinalities: Vec<usize> = (0..width - 1)
            .map(|v| rows.iter().map(|(s, _)| s[v] + 1).max().unwrap_or(0))
            .collect();
        let size: usize = cardinalities.iter().product();
        if rows.len() != size {
            return Err(Error::LengthMismatch { what: "csv rows", expected: size, actual: rows.len() });
        }
        let shape = JointPmf::uniform(&cardinalities)?;
        let mut probs = vec![f64::NAN; size];
        for (state, p) in rows {
            let i = shape.index_of(&state);
            if !probs[i].is_nan() {
                return Err(Error::InvalidProbabilities(format!("state {state:?} repeated")));
            }
            probs[i] = p;
        }
        JointPmf::new(cardinalities, probs)
    }
}
