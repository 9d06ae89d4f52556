//! CSV tables with a `# config: ...` banner line.

use std::io::Write;

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub banner: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(banner: impl Into<String>, header: &[&str]) -> Self {
        CsvTable {
            banner: banner.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut out = out;
        writeln!(out, "# config: {}", self.banner.replace('\n', " "))?;
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_string_lossy(&self) -> String {
        let mut buf = Vec::new();
        self.write(&mut buf).expect("writing to memory cannot fail");
        String::from_utf8_lossy(&buf).into_owned()
    }
}
