use std::io::{self, Write};

use fabius_core::{ApproxResult, DyadicRational, ExactRational, IdentityTable, VerificationReport};
use serde_json::json;

use crate::Format;

fn decimal(value: &ExactRational, digits: usize) -> String {
    if digits == 0 {
        String::new()
    } else {
        value.to_decimal_string(digits)
    }
}

pub fn print_value(
    out: &mut impl Write,
    format: Format,
    digits: usize,
    arg: &DyadicRational,
    value: &ExactRational,
) -> io::Result<()> {
    let dec = decimal(value, digits);
    match format {
        Format::Pretty => {
            writeln!(out, "{value}")?;
            if !dec.is_empty() {
                writeln!(out, "~ {dec}")?;
            }
        }
        Format::Json => {
            let doc = json!({
                "argument": arg.to_rational().to_string(),
                "value": value.to_string(),
                "decimal": dec,
            });
            writeln!(out, "{doc}")?;
        }
        Format::Csv => {
            writeln!(out, "argument,numerator,denominator,decimal")?;
            writeln!(out, "{},{},{},{dec}", arg.to_rational(), value.numer(), value.denom())?;
        }
    }
    Ok(())
}

fn polynomial(coeffs: &[ExactRational], first_power: usize) -> String {
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| match first_power + 2 * k {
            0 => c.to_string(),
            1 => format!("{c} x"),
            p => format!("{c} x^{p}"),
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn print_table(out: &mut impl Write, format: Format, table: &IdentityTable, max_n: u32) -> io::Result<()> {
    let levels = &table.levels()[..max_n as usize];
    match format {
        Format::Pretty => {
            for l in levels {
                let (s, d) = (&l.sum, &l.diff);
                let (a, b) = (2 * s.n - 1, 2 * d.n);
                writeln!(
                    out,
                    "2^{} (f((1+x)/2^{a}) + f((1-x)/2^{a})) = {}",
                    s.sigma,
                    polynomial(&s.coeffs, 0)
                )?;
                writeln!(
                    out,
                    "2^{} (f((1+x)/2^{b}) - f((1-x)/2^{b})) = {}",
                    d.sigma,
                    polynomial(&d.coeffs, 1)
                )?;
            }
        }
        Format::Json => {
            let mut file = table.to_file();
            file.levels.truncate(max_n as usize);
            file.max_n = max_n;
            writeln!(out, "{}", serde_json::to_string(&file).expect("table serializes"))?;
        }
        Format::Csv => {
            writeln!(out, "identity,n,sigma,power,coefficient")?;
            for l in levels {
                for (k, c) in l.sum.coeffs.iter().enumerate() {
                    writeln!(out, "S,{},{},{},{c}", l.sum.n, l.sum.sigma, 2 * k)?;
                }
                for (k, c) in l.diff.coeffs.iter().enumerate() {
                    writeln!(out, "D,{},{},{},{c}", l.diff.n, l.diff.sigma, 2 * k + 1)?;
                }
            }
        }
    }
    Ok(())
}

/// Streams `f(j/2^m)` rows without holding them in memory.
pub struct ValueSink<'a, W: Write> {
    out: &'a mut W,
    format: Format,
    digits: usize,
    m: u64,
    rows: u64,
}

impl<'a, W: Write> ValueSink<'a, W> {
    pub fn new(out: &'a mut W, format: Format, digits: usize, m: u64) -> io::Result<Self> {
        match format {
            Format::Csv => writeln!(out, "j,numerator,denominator,decimal")?,
            Format::Json => write!(out, "[")?,
            Format::Pretty => {}
        }
        Ok(Self { out, format, digits, m, rows: 0 })
    }

    pub fn row(&mut self, j: u64, value: &ExactRational) -> io::Result<()> {
        let dec = decimal(value, self.digits);
        match self.format {
            Format::Csv => writeln!(self.out, "{j},{},{},{dec}", value.numer(), value.denom())?,
            Format::Json => {
                let sep = if self.rows == 0 { "" } else { "," };
                let doc = json!({
                    "j": j,
                    "numerator": value.numer().to_string(),
                    "denominator": value.denom().to_string(),
                    "decimal": dec,
                });
                write!(self.out, "{sep}\n{doc}")?;
            }
            Format::Pretty => {
                let arg = format!("f({j}/2^{})", self.m);
                if dec.is_empty() {
                    writeln!(self.out, "{arg:<16} {value}")?;
                } else {
                    writeln!(self.out, "{arg:<16} {dec}  {value}")?;
                }
            }
        }
        self.rows += 1;
        Ok(())
    }

    pub fn finish(self) -> io::Result<()> {
        if self.format == Format::Json {
            writeln!(self.out, "\n]")?;
        }
        Ok(())
    }
}

pub fn print_reports(out: &mut impl Write, format: Format, reports: &[VerificationReport]) -> io::Result<()> {
    match format {
        Format::Pretty => {
            for r in reports {
                let passed = r.cases - r.failures.len();
                let verdict = if r.pass { "pass" } else { "FAIL" };
                writeln!(out, "{}: {passed}/{} {verdict}", r.suite, r.cases)?;
                for f in &r.failures {
                    writeln!(out, "  {}: expected {}, got {}", f.input, f.expected, f.got)?;
                }
            }
        }
        Format::Json => {
            writeln!(out, "{}", serde_json::to_string(reports).expect("reports serialize"))?;
        }
        Format::Csv => {
            writeln!(out, "suite,cases,failures,pass")?;
            for r in reports {
                writeln!(out, "{},{},{},{}", r.suite, r.cases, r.failures.len(), r.pass)?;
            }
        }
    }
    Ok(())
}

pub fn print_approx(out: &mut impl Write, format: Format, digits: usize, a: &ApproxResult) -> io::Result<()> {
    let dec = decimal(&a.value, digits);
    let anchor = a.anchor.to_rational();
    match format {
        Format::Pretty => {
            writeln!(out, "anchor: {anchor}")?;
            writeln!(out, "value:  {}", a.value)?;
            if !dec.is_empty() {
                writeln!(out, "        ~ {dec}")?;
            }
            writeln!(out, "bound:  {}", a.error_bound)?;
        }
        Format::Json => {
            let doc = json!({
                "query": a.query.to_string(),
                "anchor": anchor.to_string(),
                "value": a.value.to_string(),
                "decimal": dec,
                "error_bound": a.error_bound.to_string(),
            });
            writeln!(out, "{doc}")?;
        }
        Format::Csv => {
            writeln!(out, "query,anchor,value,decimal,error_bound")?;
            writeln!(out, "{},{anchor},{},{dec},{}", a.query, a.value, a.error_bound)?;
        }
    }
    Ok(())
}
