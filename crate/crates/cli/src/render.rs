//! Rendering of one invocation's outcome in each output format.
//!
//! Text prints labeled result lines, json prints one envelope object with
//! sorted keys, csv prints the counting table. Unbounded integers always
//! render as decimal strings; machine-width counts stay JSON numbers.

use cyclodens::engine::{decimal_six, CountRow, MembershipResult, SupportProfile};
use cyclodens::engine::{WitnessCertificate, WitnessReport};
use cyclodens::selftest::SelfTestCase;
use cyclodens::BigInt;
use serde_json::{json, Map, Value};

use crate::args::{Command, Format};

/// Command-specific result data, ready to print.
pub enum Report {
    Exponents {
        exponents: Vec<BigInt>,
        profile: SupportProfile,
    },
    Density {
        profile: SupportProfile,
    },
    Member {
        result: MembershipResult,
    },
    Witness {
        certificate: WitnessCertificate,
        report: WitnessReport,
    },
    Count {
        rows: Vec<CountRow>,
    },
    Cyclotomic {
        coefficients: Vec<BigInt>,
        reach: Reach,
    },
    Selftest {
        cases: Vec<SelfTestCase>,
    },
}

/// Whether a coefficient list is an exact polynomial or a truncation.
pub enum Reach {
    Degree(usize),
    Order(usize),
}

/// What one invocation produced.
pub enum Outcome {
    Success(Report),
    Failure { code: &'static str, message: String },
}

/// Renders the single output block for an invocation.
pub fn render(command: &str, inputs: Value, outcome: &Outcome, format: Format) -> String {
    match format {
        Format::Text => text_body(outcome),
        Format::Json => json_body(command, inputs, outcome),
        Format::Csv => csv_body(outcome),
    }
}

/// Echo of the parsed arguments for the json envelope.
pub fn inputs_json(command: &Command) -> Value {
    match command {
        Command::Exponents { seq } | Command::Density { seq } => json!({
            "seq": strings_of(seq),
        }),
        Command::Member { n, seq, brute } => json!({
            "brute": brute,
            "n": n.to_string(),
            "seq": strings_of(seq),
        }),
        Command::Witness { seq, exact_check } => json!({
            "exact_check": exact_check,
            "seq": strings_of(seq),
        }),
        Command::Count {
            seq,
            limit,
            checkpoints,
        } => json!({
            "checkpoints": checkpoints,
            "limit": limit,
            "seq": strings_of(seq),
        }),
        Command::Cyclotomic { n, trunc } => match trunc {
            Some(order) => json!({ "n": n, "trunc": order }),
            None => json!({ "n": n }),
        },
        Command::Selftest => json!({}),
    }
}

fn text_body(outcome: &Outcome) -> String {
    let lines = match outcome {
        Outcome::Success(report) => text_lines(report),
        Outcome::Failure { code, message } => vec![format!("error: {code}: {message}")],
    };
    let mut body = lines.join("\n");
    body.push('\n');
    body
}

fn text_lines(report: &Report) -> Vec<String> {
    match report {
        Report::Exponents { exponents, profile } => vec![
            list_line("k", exponents),
            list_line("support", &profile.support),
            format!("modulus: {}", profile.modulus),
            format!("density: 1/{}", profile.modulus),
        ],
        Report::Density { profile } => vec![
            format!("modulus: {}", profile.modulus),
            format!("density: 1/{}", profile.modulus),
        ],
        Report::Member { result } => {
            let mut lines = vec![
                format!("member: {}", result.member),
                format!("reason: {}", result.reason.as_str()),
            ];
            if let Some(certificate) = &result.certificate {
                lines.push(list_line("certificate", certificate));
            }
            lines
        }
        Report::Witness {
            certificate,
            report,
        } => {
            let mut lines = vec![
                format!("n: {}", certificate.n),
                format!("modulus: {}", certificate.modulus),
            ];
            for group in &certificate.groups {
                lines.push(format!(
                    "group: index={} exponent={} labels={}",
                    group.index,
                    group.exponent,
                    joined(&group.labels)
                ));
            }
            lines.push(list_line("indices", &certificate.cyclotomic_indices));
            lines.push(format!("verified: {}", report.valid()));
            lines.push(format!("exact: {}", report.exact.as_str()));
            for defect in &report.defects {
                lines.push(format!("defect: {defect}"));
            }
            lines
        }
        Report::Count { rows } => {
            let mut lines = vec!["x  N  floor(x/l)  ratio".to_string()];
            for row in rows {
                lines.push(format!(
                    "{}  {}  {}  {}/{} ({})",
                    row.x,
                    row.members,
                    row.bound,
                    row.ratio.numer(),
                    row.ratio.denom(),
                    decimal_six(&row.ratio)
                ));
            }
            lines
        }
        Report::Cyclotomic {
            coefficients,
            reach,
        } => {
            let mut lines = vec![list_line("coefficients", coefficients)];
            lines.push(match reach {
                Reach::Degree(degree) => format!("degree: {degree}"),
                Reach::Order(order) => format!("order: {order}"),
            });
            lines
        }
        Report::Selftest { cases } => {
            let mut lines: Vec<String> = cases
                .iter()
                .map(|case| {
                    let status = if case.passed { "ok" } else { "FAIL" };
                    format!("{status} {}: {}", case.name, case.detail)
                })
                .collect();
            let passed = cases.iter().filter(|case| case.passed).count();
            lines.push(format!("passed {passed} of {}", cases.len()));
            lines
        }
    }
}

fn json_body(command: &str, inputs: Value, outcome: &Outcome) -> String {
    let mut envelope = Map::new();
    envelope.insert("command".into(), Value::String(command.into()));
    envelope.insert("inputs".into(), inputs);
    match outcome {
        Outcome::Success(report) => {
            envelope.insert("result".into(), result_json(report));
            envelope.insert("status".into(), Value::String("ok".into()));
        }
        Outcome::Failure { code, message } => {
            envelope.insert("error".into(), json!({ "code": code, "message": message }));
            envelope.insert("status".into(), Value::String("error".into()));
        }
    }
    let mut body = Value::Object(envelope).to_string();
    body.push('\n');
    body
}

fn result_json(report: &Report) -> Value {
    match report {
        Report::Exponents { exponents, profile } => json!({
            "density": format!("1/{}", profile.modulus),
            "k": strings_of(exponents),
            "modulus": profile.modulus.to_string(),
            "support": profile.support,
        }),
        Report::Density { profile } => json!({
            "density": format!("1/{}", profile.modulus),
            "modulus": profile.modulus.to_string(),
        }),
        Report::Member { result } => {
            let mut map = Map::new();
            if let Some(certificate) = &result.certificate {
                map.insert("certificate".into(), strings_of(certificate));
            }
            map.insert("member".into(), Value::Bool(result.member));
            map.insert("reason".into(), result.reason.as_str().into());
            Value::Object(map)
        }
        Report::Witness {
            certificate,
            report,
        } => json!({
            "defects": report.defects.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "exact": report.exact.as_str(),
            "groups": certificate.groups.iter().map(|group| json!({
                "exponent": group.exponent.to_string(),
                "index": group.index,
                "labels": strings_of(&group.labels),
            })).collect::<Vec<_>>(),
            "indices": strings_of(&certificate.cyclotomic_indices),
            "modulus": certificate.modulus.to_string(),
            "n": certificate.n.to_string(),
            "verified": report.valid(),
        }),
        Report::Count { rows } => json!({
            "rows": rows.iter().map(|row| json!({
                "bound": row.bound,
                "decimal": decimal_six(&row.ratio),
                "members": row.members,
                "ratio": format!("{}/{}", row.ratio.numer(), row.ratio.denom()),
                "x": row.x,
            })).collect::<Vec<_>>(),
        }),
        Report::Cyclotomic {
            coefficients,
            reach,
        } => {
            let mut map = Map::new();
            map.insert("coefficients".into(), strings_of(coefficients));
            match reach {
                Reach::Degree(degree) => map.insert("degree".into(), json!(degree)),
                Reach::Order(order) => map.insert("order".into(), json!(order)),
            };
            Value::Object(map)
        }
        Report::Selftest { cases } => {
            let passed = cases.iter().filter(|case| case.passed).count();
            json!({
                "cases": cases.iter().map(|case| json!({
                    "detail": case.detail,
                    "name": case.name,
                    "passed": case.passed,
                })).collect::<Vec<_>>(),
                "failed": cases.len() - passed,
                "passed": passed,
            })
        }
    }
}

fn csv_body(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Success(Report::Count { rows }) => {
            let mut body = String::from("x,N,floor_x_over_l,ratio_num,ratio_den\n");
            for row in rows {
                body.push_str(&format!(
                    "{},{},{},{},{}\n",
                    row.x,
                    row.members,
                    row.bound,
                    row.ratio.numer(),
                    row.ratio.denom()
                ));
            }
            body
        }
        Outcome::Success(_) => csv_error("internal", "csv rendering is limited to the count command"),
        Outcome::Failure { code, message } => csv_error(code, message),
    }
}

fn csv_error(code: &str, message: &str) -> String {
    format!("error,{},{}\n", csv_field(code), csv_field(message))
}

/// Quotes a field when it would break the row, per the usual CSV rules.
fn csv_field(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_string()
    }
}

fn joined<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|item| item.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// `label: a,b,c`, or just `label:` for an empty list.
fn list_line<T: std::fmt::Display>(label: &str, items: &[T]) -> String {
    if items.is_empty() {
        format!("{label}:")
    } else {
        format!("{label}: {}", joined(items))
    }
}

fn strings_of<T: std::fmt::Display>(items: &[T]) -> Value {
    Value::Array(
        items
            .iter()
            .map(|item| Value::String(item.to_string()))
            .collect(),
    )
}
