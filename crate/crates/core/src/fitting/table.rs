//! Sample tables and the readers that build them.
//!
//! Two input layouts are supported: manufacturer propeller performance files
//! (whitespace-delimited, one block per `PROP RPM = …` header, imperial
//! units) and CSV bench logs whose header cells read `name:unit`.

use std::io::{BufRead, Read};

use crate::fitting::units::{Quantity, Unit};
use crate::fitting::FitError;

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    /// SI unit of the stored values.
    pub unit: Unit,
}

/// Named, unit-tagged columns of equal length. Values are stored in SI.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SampleTable {
    columns: Vec<Column>,
    data: Vec<Vec<f64>>,
}

impl SampleTable {
    pub fn new(columns: Vec<Column>) -> Self {
        let data = vec![Vec::new(); columns.len()];
        Self { columns, data }
    }

    /// Builds a table from `(name, SI unit, values)` triples of equal length.
    pub fn from_columns(cols: Vec<(&str, Unit, Vec<f64>)>) -> Result<Self, FitError> {
        let len = cols.first().map_or(0, |c| c.2.len());
        if let Some(c) = cols.iter().find(|c| c.2.len() != len) {
            return Err(FitError::LengthMismatch {
                expected: len,
                found: c.2.len(),
            });
        }
        let (columns, data) = cols
            .into_iter()
            .map(|(name, unit, values)| {
                (
                    Column {
                        name: name.to_string(),
                        unit,
                    },
                    values,
                )
            })
            .unzip();
        Ok(Self { columns, data })
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.data.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn push_row(&mut self, row: &[f64]) -> Result<(), FitError> {
        if row.len() != self.columns.len() {
            return Err(FitError::LengthMismatch {
                expected: self.columns.len(),
                found: row.len(),
            });
        }
        for (col, &v) in self.data.iter_mut().zip(row) {
            col.push(v);
        }
        Ok(())
    }

    fn position(&self, name: &str) -> Result<usize, FitError> {
        self.columns
            .iter()
            .position(|c| c.name == name)
            .ok_or_else(|| FitError::MissingColumn(name.to_string()))
    }

    pub fn column(&self, name: &str) -> Result<&[f64], FitError> {
        Ok(&self.data[self.position(name)?])
    }

    pub fn unit(&self, name: &str) -> Result<Unit, FitError> {
        Ok(self.columns[self.position(name)?].unit)
    }

    /// Reads a CSV log whose header cells are `name:unit`, converting to SI.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, FitError> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(|e| csv_error(e, 1))?.clone();
        let mut source_units = Vec::with_capacity(headers.len());
        let mut columns = Vec::with_capacity(headers.len());
        for h in headers.iter() {
            let (name, unit) = h
                .split_once(':')
                .ok_or_else(|| FitError::UnknownUnit(format!("no unit declared for column `{h}`")))?;
            let unit: Unit = unit.parse()?;
            source_units.push(unit);
            columns.push(Column {
                name: name.trim().to_string(),
                unit: unit.si(),
            });
        }
        let mut table = SampleTable::new(columns);
        let mut row = Vec::with_capacity(source_units.len());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| csv_error(e, 0))?;
            let line = rec.position().map_or(0, |p| p.line() as usize);
            row.clear();
            for (cell, unit) in rec.iter().zip(&source_units) {
                let v: f64 = cell.parse().map_err(|_| FitError::Parse {
                    line,
                    message: format!("`{cell}` is not a number"),
                })?;
                row.push(unit.to_si(v));
            }
            table.push_row(&row).map_err(|_| FitError::Parse {
                line,
                message: "row is not full".into(),
            })?;
        }
        Ok(table)
    }
}

fn csv_error(e: csv::Error, fallback_line: usize) -> FitError {
    let line = e.position().map_or(fallback_line, |p| p.line() as usize);
    FitError::Parse {
        line,
        message: e.to_string(),
    }
}

/// Source column names in a propeller performance file.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMap {
    pub speed: String,
    pub thrust: String,
    pub torque: String,
}

impl Default for ColumnMap {
    fn default() -> Self {
        Self {
            speed: "V".into(),
            thrust: "Thrust".into(),
            torque: "Torque".into(),
        }
    }
}

/// Units of the mapped source columns.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitMap {
    pub speed: Unit,
    pub thrust: Unit,
    pub torque: Unit,
}

impl Default for UnitMap {
    fn default() -> Self {
        Self {
            speed: Unit::MilePerHour,
            thrust: Unit::PoundForce,
            torque: Unit::InchPoundForce,
        }
    }
}

impl UnitMap {
    pub fn parse(speed: &str, thrust: &str, torque: &str) -> Result<Self, FitError> {
        let m = Self {
            speed: speed.parse()?,
            thrust: thrust.parse()?,
            torque: torque.parse()?,
        };
        let expect = [
            (m.speed, Quantity::Speed, speed),
            (m.thrust, Quantity::Force, thrust),
            (m.torque, Quantity::Torque, torque),
        ];
        for (u, q, s) in expect {
            if u.quantity() != q {
                return Err(FitError::UnknownUnit(format!("`{s}` is not a {q:?} unit")));
            }
        }
        Ok(m)
    }
}

/// Reads a propeller performance file into columns `vp` (m/s), `rpm`,
/// `thrust` (N) and `torque` (N·m).
///
/// Lines before the first block and title lines are ignored. Inside a block,
/// the line naming the mapped columns is the header and a following line of
/// parenthesized units is skipped; every other non-blank line must be numeric.
pub fn parse_propeller_table<R: BufRead>(
    reader: R,
    columns: &ColumnMap,
    units: &UnitMap,
) -> Result<SampleTable, FitError> {
    let mut table = SampleTable::new(vec![
        Column { name: "vp".into(), unit: Unit::MetrePerSecond },
        Column { name: "rpm".into(), unit: Unit::Rpm },
        Column { name: "thrust".into(), unit: Unit::Newton },
        Column { name: "torque".into(), unit: Unit::NewtonMetre },
    ]);
    let mut rpm: Option<f64> = None;
    let mut header: Option<[usize; 3]> = None;
    let mut after_header = false;

    for (k, line) in reader.lines().enumerate() {
        let line_no = k + 1;
        let line = line?;
        let text = line.trim();
        if text.is_empty() {
            continue;
        }
        if text.to_ascii_uppercase().contains("PROP RPM") {
            let value = text
                .split_once('=')
                .and_then(|(_, v)| v.trim().parse::<f64>().ok())
                .ok_or_else(|| FitError::Parse {
                    line: line_no,
                    message: "cannot read block RPM".into(),
                })?;
            rpm = Some(value);
            header = None;
            continue;
        }
        let tokens: Vec<&str> = text.split_whitespace().collect();
        let find = |name: &str| tokens.iter().position(|t| *t == name);
        if let (Some(s), Some(t), Some(q)) = (find(&columns.speed), find(&columns.thrust), find(&columns.torque)) {
            header = Some([s, t, q]);
            after_header = true;
            continue;
        }
        if after_header {
            after_header = false;
            if tokens.iter().any(|t| t.starts_with('(')) {
                continue;
            }
        }
        let (Some(idx), Some(block_rpm)) = (header, rpm) else {
            continue;
        };
        let cell = |i: usize| -> Result<f64, FitError> {
            let tok = tokens.get(i).ok_or_else(|| FitError::Parse {
                line: line_no,
                message: format!("expected at least {} fields", i + 1),
            })?;
            tok.parse::<f64>().map_err(|_| FitError::Parse {
                line: line_no,
                message: format!("`{tok}` is not a number"),
            })
        };
        // Every token must be numeric, not only the mapped ones.
        for i in 0..tokens.len() {
            cell(i)?;
        }
        let vp = units.speed.to_si(cell(idx[0])?);
        let thrust = units.thrust.to_si(cell(idx[1])?);
        let torque = units.torque.to_si(cell(idx[2])?);
        table.push_row(&[vp, block_rpm, thrust, torque])?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIXTURE: &str = "\
         10x45 test prop

   PROP RPM =     5000

    V          J       Torque     Thrust
   (mph)   (Adv_Ratio) (In-Lbf)   (Lbf)
    0.0      0.00       0.500      1.000
   10.0      0.12       0.450      0.800

   PROP RPM =     6000

    V          J       Torque     Thrust
   (mph)   (Adv_Ratio) (In-Lbf)   (Lbf)
    2.0      0.02       0.700      1.400
";

    #[test]
    fn parses_blocks_and_converts_units() {
        let t = parse_propeller_table(FIXTURE.as_bytes(), &ColumnMap::default(), &UnitMap::default())
            .unwrap();
        assert_eq!(t.len(), 3);
        let vp = t.column("vp").unwrap();
        let rpm = t.column("rpm").unwrap();
        let thrust = t.column("thrust").unwrap();
        let torque = t.column("torque").unwrap();
        // hand conversions: 10 mph = 4.4704 m/s; 0.8 lbf = 3.55858 N; 0.45 in·lbf = 0.0508432 N·m
        assert!((vp[1] - 4.4704).abs() < 1e-12);
        assert_eq!(rpm, &[5000.0, 5000.0, 6000.0]);
        assert!((thrust[1] - 0.8 * 4.4482216).abs() < 1e-6);
        assert!((torque[1] - 0.45 * 0.1129848).abs() < 1e-7);
        assert!((vp[2] - 0.89408).abs() < 1e-12);
    }

    #[test]
    fn empty_body_gives_empty_table() {
        let t = parse_propeller_table("".as_bytes(), &ColumnMap::default(), &UnitMap::default())
            .unwrap();
        assert!(t.is_empty());
        let only_header = "   PROP RPM = 1000\n  V  J Torque Thrust\n (mph) (-) (In-Lbf) (Lbf)\n";
        let t = parse_propeller_table(only_header.as_bytes(), &ColumnMap::default(), &UnitMap::default())
            .unwrap();
        assert!(t.is_empty());
    }

    #[test]
    fn malformed_cell_reports_line() {
        let bad = FIXTURE.replace("0.450", "0.4x0");
        let err = parse_propeller_table(bad.as_bytes(), &ColumnMap::default(), &UnitMap::default())
            .unwrap_err();
        match err {
            FitError::Parse { line, .. } => assert_eq!(line, 8),
            e => panic!("unexpected {e:?}"),
        }
    }

    #[test]
    fn unit_map_rejects_wrong_quantity() {
        assert!(UnitMap::parse("mph", "lbf", "in-lbf").is_ok());
        assert!(matches!(UnitMap::parse("lbf", "lbf", "in-lbf"), Err(FitError::UnknownUnit(_))));
        assert!(matches!(UnitMap::parse("knots", "lbf", "in-lbf"), Err(FitError::UnknownUnit(_))));
    }

    #[test]
    fn csv_with_units() {
        let src = "alpha:deg,cl:-,cd:-\n0,-0.24,0.14\n10,0.56,0.2987\n";
        let t = SampleTable::from_csv(src.as_bytes()).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.column("cl").unwrap(), &[-0.24, 0.56]);
        assert_eq!(t.unit("alpha").unwrap(), Unit::Degree);

        let imperial = "torque:in-lbf,current:A\n1.0,2.0\n";
        let t = SampleTable::from_csv(imperial.as_bytes()).unwrap();
        assert!((t.column("torque").unwrap()[0] - 0.1129848).abs() < 1e-7);
        assert_eq!(t.unit("torque").unwrap(), Unit::NewtonMetre);

        assert!(matches!(
            SampleTable::from_csv("alpha,cl\n1,2\n".as_bytes()),
            Err(FitError::UnknownUnit(_))
        ));
        let err = SampleTable::from_csv("a:-,b:-\n1,2\n3,oops\n".as_bytes()).unwrap_err();
        assert!(matches!(err, FitError::Parse { line: 3, .. }), "{err:?}");
        assert!(matches!(t.column("nope"), Err(FitError::MissingColumn(_))));
    }
}
