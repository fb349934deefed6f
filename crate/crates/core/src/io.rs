//! Reading and writing kill matrices and failure observations.
//!
//! CSV layout: `mutant_id,method,operator,description,t:<test>...`, one row
//! per mutant, kill cells exactly `0` or `1`, `\n` line endings.
//! The JSON layout carries the same fields with `kills` as arrays of 0/1.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::{FailureObservation, KillMatrix, MutantRecord, MutationOperator, TestId};

const FIXED_COLUMNS: [&str; 4] = ["mutant_id", "method", "operator", "description"];
const TEST_PREFIX: &str = "t:";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixFormat {
    Csv,
    Json,
}

impl MatrixFormat {
    /// Picks the format from the file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => MatrixFormat::Json,
            _ => MatrixFormat::Csv,
        }
    }
}

pub fn load_matrix(path: &Path, format: MatrixFormat) -> Result<KillMatrix> {
    let text = fs::read_to_string(path)?;
    match format {
        MatrixFormat::Csv => read_csv(text.as_bytes()),
        MatrixFormat::Json => from_json_str(&text),
    }
}

pub fn save_matrix(matrix: &KillMatrix, path: &Path, format: MatrixFormat) -> Result<()> {
    let bytes = match format {
        MatrixFormat::Csv => to_csv_bytes(matrix)?,
        MatrixFormat::Json => to_json_string(matrix)?.into_bytes(),
    };
    fs::write(path, bytes)?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<KillMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => return Err(Error::format(1, "missing header")),
    };
    if header.len() < FIXED_COLUMNS.len()
        || header.iter().take(4).ne(FIXED_COLUMNS.iter().copied())
    {
        return Err(Error::format(
            1,
            format!("header must start with `{}`", FIXED_COLUMNS.join(",")),
        ));
    }
    let mut tests = Vec::with_capacity(header.len() - 4);
    for field in header.iter().skip(4) {
        match field.strip_prefix(TEST_PREFIX) {
            Some(name) if !name.is_empty() => tests.push(TestId::new(name)),
            _ => {
                return Err(Error::format(
                    1,
                    format!("test column `{field}` must be `t:<name>`"),
                ))
            }
        }
    }
    check_unique(tests.iter().map(TestId::as_str), "test", 1)?;

    let width = 4 + tests.len();
    let mut mutants = Vec::new();
    let mut kills = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(Error::format(
                line,
                format!("expected {width} fields, found {}", rec.len()),
            ));
        }
        let id = &rec[0];
        if id.is_empty() {
            return Err(Error::format(line, "empty mutant id"));
        }
        if !seen.insert(id.to_owned()) {
            return Err(Error::format(line, format!("duplicate mutant id `{id}`")));
        }
        if rec[1].is_empty() {
            return Err(Error::format(line, "empty method name"));
        }
        let operator: MutationOperator = rec[2]
            .parse()
            .map_err(|e: String| Error::format(line, e))?;
        mutants.push(MutantRecord::new(id, &rec[1], operator, &rec[3]));
        for cell in rec.iter().skip(4) {
            kills.push(match cell {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::format(
                        line,
                        format!("kill cell `{other}` is not 0 or 1"),
                    ))
                }
            });
        }
    }
    KillMatrix::from_flat(tests, mutants, kills)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::format(line, e.to_string())
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>, what: &str, line: u64) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(Error::format(line, format!("duplicate {what} `{n}`")));
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(matrix: &KillMatrix, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    let header = FIXED_COLUMNS
        .iter()
        .map(|s| s.to_string())
        .chain(matrix.tests().iter().map(|t| format!("{TEST_PREFIX}{t}")));
    wtr.write_record(header).map_err(csv_io)?;
    for (m, row) in matrix.rows() {
        let fixed = [m.id.as_str(), m.method.as_str(), m.operator.tag(), &m.description];
        let cells = row.iter().map(|&k| if k { "1" } else { "0" });
        wtr.write_record(fixed.into_iter().chain(cells)).map_err(csv_io)?;
    }
    wtr.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidMatrix(format!("{other:?}")),
    }
}

pub fn to_csv_bytes(matrix: &KillMatrix) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_csv(matrix, &mut buf)?;
    Ok(buf)
}

#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    tests: Vec<TestId>,
    mutants: Vec<MutantDoc>,
}

#[derive(Serialize, Deserialize)]
struct MutantDoc {
    id: String,
    method: String,
    operator: MutationOperator,
    #[serde(default)]
    description: String,
    kills: Vec<Cell>,
}

/// A kill cell that only accepts the integers 0 and 1.
#[derive(Clone, Copy)]
struct Cell(bool);

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(self.0 as u8)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(Cell(false)),
            1 => Ok(Cell(true)),
            v => Err(serde::de::Error::custom(format!(
                "kill cell {v} is not 0 or 1"
            ))),
        }
    }
}

pub fn to_json_string(matrix: &KillMatrix) -> Result<String> {
    let doc = MatrixDoc {
        tests: matrix.tests().to_vec(),
        mutants: matrix
            .rows()
            .map(|(m, row)| MutantDoc {
                id: m.id.clone(),
                method: m.method.to_string(),
                operator: m.operator,
                description: m.description.clone(),
                kills: row.iter().map(|&k| Cell(k)).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json_str(text: &str) -> Result<KillMatrix> {
    let doc: MatrixDoc = serde_json::from_str(text)
        .map_err(|e| Error::format(e.line() as u64, e.to_string()))?;
    check_unique(doc.tests.iter().map(TestId::as_str), "test", 0)?;
    let mut mutants = Vec::with_capacity(doc.mutants.len());
    let mut kills = Vec::with_capacity(doc.mutants.len() * doc.tests.len());
    for m in doc.mutants {
        if m.kills.len() != doc.tests.len() {
            return Err(Error::InvalidMatrix(format!(
                "mutant `{}` has {} kill cells, expected {}",
                m.id,
                m.kills.len(),
                doc.tests.len()
            )));
        }
        kills.extend(m.kills.iter().map(|c| c.0));
        mutants.push(MutantRecord::new(m.id, m.method, m.operator, m.description));
    }
    KillMatrix::from_flat(doc.tests, mutants, kills)
}

pub fn load_observation(path: &Path) -> Result<FailureObservation> {
    let text = fs::read_to_string(path)?;
    let obs: FailureObservation = serde_json::from_str(&text)
        .map_err(|e| Error::format(e.line() as u64, e.to_string()))?;
    obs.validate()?;
    Ok(obs)
}

pub fn save_observation(obs: &FailureObservation, path: &Path) -> Result<()> {
    let mut s = serde_json::to_string_pretty(obs)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_matrix;

    const EXAMPLE_CSV: &str = "\
mutant_id,method,operator,description,t:t1,t:t2,t:t3,t:t4
m1,getType,COR,n.isName() ↦ true,0,0,0,1
m2,getType,COR,n.isName() ↦ false,1,0,0,1
m3,getType,COR,bFlag || isInferred ↦ isInferred,0,1,0,1
m4,getType,STD,varType ↦ <NO-OP>,0,1,0,1
m5,resolveType,COR,param.isTemplateType() ↦ true,0,1,0,1
m6,resolveType,STD,resolvedType() ↦ <NO-OP>,1,0,0,1
m7,resolveType,ROR,argObjectType != null ↦ true,1,0,0,0
";

    #[test]
    fn golden_csv_matches_fixture() {
        let m = read_csv(EXAMPLE_CSV.as_bytes()).unwrap();
        assert_eq!(m.num_mutants(), 7);
        assert_eq!(m.num_tests(), 4);
        assert_eq!(m, example_matrix());
        assert_eq!(String::from_utf8(to_csv_bytes(&m).unwrap()).unwrap(), EXAMPLE_CSV);
    }

    #[test]
    fn header_only_is_an_empty_matrix() {
        let m = read_csv("mutant_id,method,operator,description,t:a,t:b\n".as_bytes()).unwrap();
        assert_eq!(m.num_mutants(), 0);
        assert_eq!(m.num_tests(), 2);
    }

    fn format_line(text: &str) -> u64 {
        match read_csv(text.as_bytes()) {
            Err(Error::Format { line, .. }) => line,
            other => panic!("expected format error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_csv_reports_line() {
        let h = "mutant_id,method,operator,description,t:a\n";
        assert_eq!(format_line(&format!("{h}m1,f,AOR,x,2\n")), 2);
        assert_eq!(format_line(&format!("{h}m1,f,AOR,x,1\nm2,f,AOR,x,1,0\n")), 3);
        assert_eq!(format_line(&format!("{h}m1,f,AOR,x,1\nm1,f,AOR,x,0\n")), 3);
        assert_eq!(format_line(&format!("{h}m1,f,BOGUS,x,1\n")), 2);
        assert_eq!(format_line("id,method,operator,description,t:a\n"), 1);
        assert_eq!(format_line("mutant_id,method,operator,description,a\n"), 1);
        assert_eq!(format_line("mutant_id,method,operator,description,t:a,t:a\n"), 1);
        assert_eq!(format_line(""), 1);
    }

    #[test]
    fn descriptions_with_commas_are_quoted() {
        let m = KillMatrix::new(
            vec!["a".into()],
            vec![MutantRecord::new("m1", "f", MutationOperator::Aor, "g(a, b) ↦ g(a - b)")],
            vec![vec![true]],
        )
        .unwrap();
        let bytes = to_csv_bytes(&m).unwrap();
        assert_eq!(read_csv(bytes.as_slice()).unwrap(), m);
    }

    #[test]
    fn json_round_trip_and_cell_validation() {
        let m = example_matrix();
        let s = to_json_string(&m).unwrap();
        assert_eq!(from_json_str(&s).unwrap(), m);
        let bad = r#"{"tests": ["a"],
  "mutants": [{"id": "m1", "method": "f", "operator": "AOR", "kills": [2]}]}"#;
        assert!(matches!(from_json_str(bad), Err(Error::Format { line: 2, .. })));
    }

    #[test]
    fn observation_json() {
        let obs: FailureObservation =
            serde_json::from_str(r#"{"failing": ["t1", "t4"]}"#).unwrap();
        assert!(obs.passing.is_none());
        let obs: FailureObservation =
            serde_json::from_str(r#"{"failing": ["t1"], "passing": ["t2"]}"#).unwrap();
        assert_eq!(obs.passing.unwrap().len(), 1);
    }
}
