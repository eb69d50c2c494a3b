use serde::Serialize;
use serde_json::Value;

use rove_cover::Rational;

pub const FORMAT_VERSION: &str = "1.0.0";

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub command: &'a str,
    pub format_version: &'a str,
    pub params: Value,
    pub result: Value,
}

pub fn json(command: &str, params: Value, result: Value) -> String {
    let env = Envelope {
        command,
        format_version: FORMAT_VERSION,
        params,
        result,
    };
    let mut text = serde_json::to_string_pretty(&env).expect("envelope serializes");
    text.push('\n');
    text
}

/// CSV with a header row; every rational becomes `num`, `den`, `approx`.
pub struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Table { writer }
    }

    pub fn row(&mut self, fields: Vec<String>) {
        self.writer.write_record(&fields).expect("in-memory write");
    }

    pub fn finish(self) -> String {
        let bytes = self.writer.into_inner().expect("in-memory flush");
        String::from_utf8(bytes).expect("csv is utf-8")
    }
}

pub fn rational_fields(r: &Rational) -> [String; 3] {
    [r.numer().to_string(), r.denom().to_string(), format_float(r.approx())]
}

/// Shortest round-trip decimal, matching what the JSON output prints.
pub fn format_float(x: f64) -> String {
    serde_json::to_string(&x).unwrap_or_else(|_| x.to_string())
}
