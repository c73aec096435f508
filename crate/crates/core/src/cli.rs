//! Command-line front end. `run` parses arguments, dispatches, renders the
//! resulting [`OutputRecord`] and returns the process exit code.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::asymptotics::{
    code_count_asymptotic, convergence_scan, format_rational, limit_value, AsymptoticTarget,
    CodeCountQuery, Equivalence,
};
use crate::ball::BigReal;
use crate::decimal::{format_err, format_significant};
use crate::error::Error;
use crate::prime::QValue;
use crate::qcomb::{galois_eval, galois_eval_fast, galois_polynomial};
use crate::special::{evaluate_to_digits, Precision};
use crate::table1::{check_table1, golden_rows, parse_golden, render_like, reproduce_table1};
use crate::zeta::zeta_grassmannian;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;
pub const EXIT_GOLDEN_MISMATCH: i32 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "galois",
    version,
    about = "Generalized Galois numbers and their asymptotics"
)]
pub struct Cli {
    /// Emit JSON.
    #[arg(long, global = true, conflicts_with = "csv")]
    json: bool,
    /// Emit CSV with columns command,key,label,value,err.
    #[arg(long, global = true)]
    csv: bool,
    /// Write output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Significant digits of numeric results.
    #[arg(long, global = true, env = "GALOIS_DIGITS", default_value_t = 12,
          value_parser = clap::value_parser!(u32).range(1..=2000))]
    digits: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Number of r-step flags in F_q^N, as a polynomial or at a given q.
    Eval {
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        q: Option<QValue>,
    },
    /// Limit of the scaled Galois numbers G_{rn+j}(q) q^{-u}.
    Limit {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        q: QValue,
        /// Always print in scientific notation.
        #[arg(long)]
        log_domain: bool,
    },
    /// Table of asymptotic Galois numbers.
    Table1 {
        /// Compare against the golden values and exit 4 on mismatch.
        #[arg(long)]
        check: bool,
        /// CSV file of golden rows (q,odd,even,difference).
        #[arg(long, value_name = "FILE")]
        golden: Option<PathBuf>,
    },
    /// Scaled exact values for n = 1..=nmax against the limit.
    Converge {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        j: usize,
        #[arg(long)]
        q: QValue,
        #[arg(long = "nmax")]
        nmax: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Asymptotic number of inequivalent linear codes of length n over F_{p^m}.
    Codes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value = "S")]
        equiv: Equivalence,
    },
    /// Betti numbers, zeta denominator and point counts of Gr(k, N).
    Zeta {
        #[arg(long)]
        k: usize,
        #[arg(long = "N")]
        n: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueEntry {
    pub key: String,
    pub label: String,
    pub value: String,
    pub err: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub command: String,
    pub params: BTreeMap<String, String>,
    pub values: Vec<ValueEntry>,
    pub status: String,
    pub elapsed_ms: u64,
    pub digits: u32,
    pub working_bits: Option<u64>,
}

#[derive(Serialize, Deserialize)]
struct CsvRow {
    command: String,
    key: String,
    label: String,
    value: String,
    err: String,
}

const META: &str = "meta";
const PARAM: &str = "param";

impl OutputRecord {
    fn new(command: &str) -> Self {
        OutputRecord {
            command: command.to_string(),
            params: BTreeMap::new(),
            values: Vec::new(),
            status: "ok".to_string(),
            elapsed_ms: 0,
            digits: 0,
            working_bits: None,
        }
    }

    fn param(&mut self, name: &str, value: impl ToString) {
        self.params.insert(name.to_string(), value.to_string());
    }

    fn push(
        &mut self,
        key: impl Into<String>,
        label: impl Into<String>,
        value: impl Into<String>,
        err: impl Into<String>,
    ) {
        self.values.push(ValueEntry {
            key: key.into(),
            label: label.into(),
            value: value.into(),
            err: err.into(),
        });
    }

    fn push_ball(
        &mut self,
        key: impl Into<String>,
        label: impl Into<String>,
        v: &BigReal,
        digits: u32,
        sci: bool,
    ) {
        self.push(
            key,
            label,
            format_significant(v.mid(), digits, sci),
            format_err(v.rad()),
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> crate::error::Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    /// One line per value, preceded by parameter lines and followed by the
    /// metadata, so the CSV carries the same data as the JSON.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let row = |key: &str, label: &str, value: &str, err: &str| CsvRow {
            command: self.command.clone(),
            key: key.to_string(),
            label: label.to_string(),
            value: value.to_string(),
            err: err.to_string(),
        };
        let mut rows = Vec::new();
        for (k, v) in &self.params {
            rows.push(row(k, PARAM, v, ""));
        }
        for v in &self.values {
            rows.push(row(&v.key, &v.label, &v.value, &v.err));
        }
        rows.push(row("status", META, &self.status, ""));
        rows.push(row("elapsed_ms", META, &self.elapsed_ms.to_string(), ""));
        rows.push(row("digits", META, &self.digits.to_string(), ""));
        let bits = self.working_bits.map(|b| b.to_string()).unwrap_or_default();
        rows.push(row("working_bits", META, &bits, ""));
        for r in rows {
            w.serialize(r).expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv buffer")).expect("utf-8")
    }

    pub fn from_csv(s: &str) -> crate::error::Result<Self> {
        let perr = |e: &dyn std::fmt::Display| Error::Parse(e.to_string());
        let mut reader = csv::Reader::from_reader(s.as_bytes());
        let mut rec = OutputRecord::new("");
        for row in reader.deserialize::<CsvRow>() {
            let row = row.map_err(|e| perr(&e))?;
            rec.command = row.command.clone();
            match (row.label.as_str(), row.key.as_str()) {
                (PARAM, _) => {
                    rec.params.insert(row.key, row.value);
                }
                (META, "status") => rec.status = row.value,
                (META, "elapsed_ms") => rec.elapsed_ms = row.value.parse().map_err(|e| perr(&e))?,
                (META, "digits") => rec.digits = row.value.parse().map_err(|e| perr(&e))?,
                (META, "working_bits") => {
                    rec.working_bits = if row.value.is_empty() {
                        None
                    } else {
                        Some(row.value.parse().map_err(|e| perr(&e))?)
                    }
                }
                _ => rec.values.push(ValueEntry {
                    key: row.key,
                    label: row.label,
                    value: row.value,
                    err: row.err,
                }),
            }
        }
        Ok(rec)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        out.push_str(&format!("{} {}\n", self.command, params.join(" ")));
        let width = self
            .values
            .iter()
            .map(|v| v.label.chars().count())
            .max()
            .unwrap_or(0);
        for v in &self.values {
            let pad = " ".repeat(width - v.label.chars().count());
            if v.err.is_empty() || v.err == "0" {
                out.push_str(&format!("  {}{pad} = {}\n", v.label, v.value));
            } else {
                out.push_str(&format!("  {}{pad} = {} ± {}\n", v.label, v.value, v.err));
            }
        }
        out.push_str(&format!("status: {}\n", self.status));
        out
    }
}

/// Failure of a command, with the exit code it maps to.
struct Failure {
    code: i32,
    message: String,
    record: Option<OutputRecord>,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Certification(_) | Error::Invariant(_) | Error::RecurrenceMismatch { .. } => {
                EXIT_CERTIFICATION
            }
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
            record: None,
        }
    }
}

type CmdResult = std::result::Result<OutputRecord, Failure>;

/// Parses `args` (including the program name), runs the command and writes
/// output. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let start = Instant::now();
    let outcome = dispatch(&cli);
    let (code, record) = match outcome {
        Ok(rec) => (EXIT_OK, Some(rec)),
        Err(f) => {
            eprintln!("error: {}", f.message);
            (f.code, f.record)
        }
    };
    if let Some(mut rec) = record {
        rec.elapsed_ms = start.elapsed().as_millis() as u64;
        rec.digits = cli.digits;
        let text = if cli.json {
            rec.to_json() + "\n"
        } else if cli.csv {
            rec.to_csv()
        } else {
            rec.to_text()
        };
        let written = match &cli.out {
            Some(path) => std::fs::write(path, text),
            None => std::io::stdout().write_all(text.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: cannot write output: {e}");
            return EXIT_USAGE;
        }
    }
    code
}

fn dispatch(cli: &Cli) -> CmdResult {
    let d = cli.digits;
    match &cli.command {
        Command::Eval { n, r, q } => cmd_eval(*n, *r, q.as_ref()),
        Command::Limit {
            r,
            j,
            q,
            log_domain,
        } => cmd_limit(*r, *j, q, *log_domain, d),
        Command::Table1 { check, golden } => cmd_table1(*check, golden.as_ref()),
        Command::Converge { r, j, q, nmax, tol } => cmd_converge(*r, *j, q, *nmax, *tol, d),
        Command::Codes { n, p, m, equiv } => cmd_codes(*n, *p, *m, *equiv, d),
        Command::Zeta { k, n, p, order } => cmd_zeta(*k, *n, *p, *order),
    }
}

fn cmd_eval(n: usize, r: usize, q: Option<&QValue>) -> CmdResult {
    let mut rec = OutputRecord::new("eval");
    rec.param("N", n);
    rec.param("r", r);
    let label = format!("G_{n}^({r})");
    match q {
        None => {
            let poly = galois_polynomial(n, r)?;
            rec.push("G", format!("{label}(q)"), poly.to_string(), "0");
        }
        Some(q) => {
            rec.param("q", q);
            let qi = q.to_exact();
            let value = if r == 2 {
                galois_eval_fast(n, &qi)?
            } else {
                galois_eval(n, r, &qi)?
            };
            rec.push("G", format!("{label}({q})"), value.to_string(), "0");
        }
    }
    Ok(rec)
}

fn cmd_limit(r: usize, j: usize, q: &QValue, log_domain: bool, digits: u32) -> CmdResult {
    let mut rec = OutputRecord::new("limit");
    rec.param("r", r);
    rec.param("j", j);
    rec.param("q", q);
    let target = AsymptoticTarget::new(r, j, q.clone())?;
    let (v, prec) = evaluate_to_digits(digits, |p| limit_value(&target, p))?;
    let sci = log_domain || target.log_domain();
    rec.push_ball("limit", "limit", &v, digits, sci);
    if sci {
        let log10 = v.mid().log2_abs() * std::f64::consts::LOG10_2;
        rec.push(
            "log10_limit",
            "log10(limit)",
            format!("{log10:.12}"),
            "1e-12",
        );
    }
    rec.working_bits = Some(prec.working_bits);
    Ok(rec)
}

fn cmd_table1(check: bool, golden: Option<&PathBuf>) -> CmdResult {
    let mut rec = OutputRecord::new("table1");
    let golden = match golden {
        Some(path) => {
            rec.param("golden", path.display());
            let text = std::fs::read_to_string(path).map_err(|e| Failure {
                code: EXIT_USAGE,
                message: format!("cannot read {}: {e}", path.display()),
                record: None,
            })?;
            parse_golden(&text)?
        }
        None => golden_rows(),
    };
    rec.param("check", check);
    let rows = reproduce_table1(&golden)?;
    for (row, g) in rows.iter().zip(&golden) {
        let [odd, even, diff] = render_like(row, g);
        rec.push(
            format!("q={}:odd", g.q),
            format!("g_odd(q={})", g.q),
            odd,
            format_err(row.odd.rad()),
        );
        rec.push(
            format!("q={}:even", g.q),
            format!("g_even(q={})", g.q),
            even,
            format_err(row.even.rad()),
        );
        rec.push(
            format!("q={}:difference", g.q),
            format!("difference(q={})", g.q),
            diff,
            format_err(row.difference.rad()),
        );
    }
    if check {
        let bad = check_table1(&rows, &golden)?;
        if !bad.is_empty() {
            rec.status = "mismatch".into();
            let lines: Vec<String> = bad
                .iter()
                .map(|m| {
                    format!(
                        "q={} {}: golden {} computed {}",
                        m.q, m.column, m.golden, m.computed
                    )
                })
                .collect();
            return Err(Failure {
                code: EXIT_GOLDEN_MISMATCH,
                message: format!("{} golden mismatches\n{}", bad.len(), lines.join("\n")),
                record: Some(rec),
            });
        }
        rec.status = "match".into();
    }
    Ok(rec)
}

fn cmd_converge(r: usize, j: usize, q: &QValue, nmax: usize, tol: f64, digits: u32) -> CmdResult {
    let mut rec = OutputRecord::new("converge");
    rec.param("r", r);
    rec.param("j", j);
    rec.param("q", q);
    rec.param("nmax", nmax);
    rec.param("tol", tol);
    let target = AsymptoticTarget::new(r, j, q.clone())?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")).into());
    }
    let from_tol = tol.log2().floor() as i64 - 20;
    let from_digits = -((digits as f64 + 2.0) * std::f64::consts::LOG2_10).ceil() as i64;
    let prec = Precision::from_log2(from_tol.min(from_digits));
    let report = convergence_scan(&target, nmax, tol, &prec)?;
    rec.push_ball("limit", "limit", &report.limit, digits, false);
    for row in &report.rows {
        let u = format_rational(&target.exponent(row.n));
        rec.push_ball(
            format!("n={}:scaled", row.n),
            format!("G_{}({q})*q^-{u}", row.big_n),
            &row.scaled,
            digits,
            false,
        );
        rec.push_ball(
            format!("n={}:gap", row.n),
            format!("gap n={}", row.n),
            &row.gap,
            3,
            true,
        );
    }
    let at = report
        .converged_at
        .map(|n| n.to_string())
        .unwrap_or_else(|| "none".into());
    rec.push("converged_at", "converged at n", at, "");
    rec.status = report.status().to_string();
    rec.working_bits = Some(prec.working_bits);
    Ok(rec)
}

fn cmd_codes(n: usize, p: u64, m: u32, equiv: Equivalence, digits: u32) -> CmdResult {
    let mut rec = OutputRecord::new("codes");
    rec.param("n", n);
    rec.param("p", p);
    rec.param("m", m);
    rec.param("equiv", equiv);
    let query = CodeCountQuery::new(n, p, m, equiv)?;
    let target = AsymptoticTarget::new(2, n % 2, query.q())?;
    let (_, prec) = evaluate_to_digits(digits + 2, |pr| limit_value(&target, pr))?;
    let report = code_count_asymptotic(&query, &prec)?;
    let huge = report.asymptotic.mid().log2_abs().abs() > 49.0;
    rec.push_ball(
        "asymptotic",
        "asymptotic count",
        &report.asymptotic,
        digits,
        huge,
    );
    let log10 = report.asymptotic.mid().log2_abs() * std::f64::consts::LOG10_2;
    rec.push(
        "log10_asymptotic",
        "log10(asymptotic)",
        format!("{log10:.12}"),
        "1e-12",
    );
    if let (Some(exact), Some(ratio)) = (&report.exact, &report.ratio) {
        let bits = prec.working_bits + 64;
        let e = BigReal::from_rational(exact, bits)?;
        rec.push_ball("exact", "exact comparator", &e, digits, huge);
        rec.push_ball("ratio", "ratio", ratio, digits, false);
    }
    rec.working_bits = Some(prec.working_bits);
    Ok(rec)
}

fn cmd_zeta(k: usize, n: usize, p: u64, order: usize) -> CmdResult {
    let mut rec = OutputRecord::new("zeta");
    rec.param("k", k);
    rec.param("N", n);
    rec.param("p", p);
    rec.param("order", order);
    let z = zeta_grassmannian(k, n, p)?;
    z.verify(order)?;
    let betti: Vec<String> = z.betti.iter().map(|b| b.to_string()).collect();
    rec.push("betti", "Betti numbers", betti.join(","), "0");
    rec.push(
        "denominator",
        "zeta denominator",
        z.denominator_string(),
        "0",
    );
    for (e, count) in (1..=order).zip(z.point_counts_from_zeta(order)) {
        let count: BigInt = count;
        rec.push(
            format!("count:n={e}"),
            format!("|Gr({k},{n})(F_{p}^{e})|"),
            count.to_string(),
            "0",
        );
    }
    Ok(rec)
}
