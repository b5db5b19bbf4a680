//! Customer file formats.
//!
//! CSV: header `price,q1,...,qd`, one customer per row.
//! JSON: `{"dim": d, "customers": [{"price": x, "qualities": [..]}]}`.
//!
//! Both readers reject NaN and infinities and return raw customer lists;
//! Pareto validation is left to [`Market`](crate::Market).

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::Customer;

fn parse_error(line: usize, field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        field: field.into(),
        message: message.into(),
    }
}

fn parse_number(text: &str, line: usize, field: &str) -> Result<f64> {
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| parse_error(line, field, format!("not a number: {text:?}")))?;
    if !value.is_finite() {
        return Err(parse_error(
            line,
            field,
            format!("non-finite value {text:?}"),
        ));
    }
    Ok(value)
}

/// Reads customers from CSV. Line numbers in errors are 1-based file lines.
pub fn read_csv<R: Read>(reader: R) -> Result<Vec<Customer>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr
        .headers()
        .map_err(|e| parse_error(1, "header", e.to_string()))?
        .clone();
    let names: Vec<&str> = header.iter().collect();
    if names.first() != Some(&"price") {
        return Err(parse_error(1, "price", "first column must be `price`"));
    }
    let dim = names.len() - 1;
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    for (k, name) in names.iter().enumerate().skip(1) {
        if *name != format!("q{k}") {
            return Err(parse_error(1, *name, format!("expected column `q{k}`")));
        }
    }

    let mut customers = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_error(line, "row", e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let price = parse_number(&record[0], line, "price")?;
        let qualities = (1..=dim)
            .map(|k| parse_number(&record[k], line, &format!("q{k}")))
            .collect::<Result<Vec<f64>>>()?;
        customers.push(Customer { price, qualities });
    }
    Ok(customers)
}

pub fn write_csv<W: Write>(writer: W, customers: &[Customer]) -> Result<()> {
    let dim = customers.first().map_or(0, Customer::dim);
    let io = |e: std::io::Error| Error::Io(e.to_string());
    let mut w = std::io::BufWriter::new(writer);
    let mut header = String::from("price");
    for k in 1..=dim {
        header.push_str(&format!(",q{k}"));
    }
    writeln!(w, "{header}").map_err(io)?;
    for c in customers {
        let mut row = c.price.to_string();
        for q in &c.qualities {
            row.push(',');
            row.push_str(&q.to_string());
        }
        writeln!(w, "{row}").map_err(io)?;
    }
    w.flush().map_err(io)
}

#[derive(Debug, Serialize, Deserialize)]
struct JsonMarket {
    dim: usize,
    customers: Vec<Customer>,
}

/// Reads customers from JSON, checking each against the declared `dim`.
pub fn read_json<R: Read>(reader: R) -> Result<Vec<Customer>> {
    let doc: JsonMarket = serde_json::from_reader(reader).map_err(|e| {
        // serde_json rejects NaN and infinities at the syntax level.
        parse_error(e.line(), "document", e.to_string())
    })?;
    if doc.dim == 0 {
        return Err(Error::ZeroDimension);
    }
    for (i, c) in doc.customers.iter().enumerate() {
        if c.dim() != doc.dim {
            return Err(Error::DimensionMismatch {
                expected: doc.dim,
                found: c.dim(),
                what: format!("customer {i}"),
            });
        }
        if !c.price.is_finite() || c.qualities.iter().any(|q| !q.is_finite()) {
            return Err(Error::NonFinite {
                what: format!("customer {i}"),
            });
        }
    }
    Ok(doc.customers)
}

pub fn write_json<W: Write>(writer: W, customers: &[Customer]) -> Result<()> {
    let doc = JsonMarket {
        dim: customers.first().map_or(0, Customer::dim),
        customers: customers.to_vec(),
    };
    serde_json::to_writer_pretty(writer, &doc).map_err(|e| Error::Io(e.to_string()))
}
