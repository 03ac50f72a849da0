//! Command-line interface for the cyclodens toolkit.
//!
//! Subcommands: `exponents`, `density`, `member`, `witness`, `count`,
//! `cyclotomic`, `selftest`. Every invocation writes exactly one output
//! block to stdout: labeled lines in text format, one envelope object in
//! json format, the counting table in csv format (count only). Identical
//! argument lists produce identical bytes.
//!
//! Exit codes: 0 on success, 1 for domain errors (rejected arguments,
//! unusable command lines), 2 for an exceeded resource cap, 3 for internal
//! failures including self-test failures.

mod args;
mod render;

use std::io::Write;

use num_traits::ToPrimitive;
use serde_json::{Map, Value};

use cyclodens::engine::{
    brute_member, count_members, find_witness, is_member, solve_exponents, support_profile,
    verify_witness, Limits,
};
use cyclodens::series::{cyclotomic_exact, cyclotomic_trunc};
use cyclodens::{selftest, Error, Result};

use args::{Command, Format};
use render::{Outcome, Reach, Report};

/// Runs one invocation against the given argument list (without the
/// program name), writes the output block, and returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write) -> i32 {
    let (body, code) = respond(args);
    let _ = out.write_all(body.as_bytes());
    code
}

fn respond(args: &[String]) -> (String, i32) {
    let invocation = match args::parse(args) {
        Ok(invocation) => invocation,
        Err(failure) => {
            let outcome = Outcome::Failure {
                code: "domain_error",
                message: failure.message,
            };
            let body = render::render(
                &failure.command,
                Value::Object(Map::new()),
                &outcome,
                args::scan_format(args),
            );
            return (body, 1);
        }
    };

    let command_name = invocation.command.name();
    let inputs = render::inputs_json(&invocation.command);

    if invocation.format == Format::Csv && !matches!(invocation.command, Command::Count { .. }) {
        let outcome = Outcome::Failure {
            code: "domain_error",
            message: format!("csv format is limited to count, not {command_name}"),
        };
        return (
            render::render(command_name, inputs, &outcome, Format::Csv),
            1,
        );
    }

    match execute(&invocation.command, &invocation.limits) {
        Ok(report) => {
            let code = exit_code_for(&report);
            let body = render::render(
                command_name,
                inputs,
                &Outcome::Success(report),
                invocation.format,
            );
            (body, code)
        }
        Err(error) => {
            let (code_name, exit) = classify(&error);
            let outcome = Outcome::Failure {
                code: code_name,
                message: error.to_string(),
            };
            let body = render::render(command_name, inputs, &outcome, invocation.format);
            (body, exit)
        }
    }
}

fn execute(command: &Command, limits: &Limits) -> Result<Report> {
    match command {
        Command::Exponents { seq } => {
            let exponents = solve_exponents(seq);
            let profile = support_profile(&exponents);
            Ok(Report::Exponents { exponents, profile })
        }
        Command::Density { seq } => Ok(Report::Density {
            profile: support_profile(&solve_exponents(seq)),
        }),
        Command::Member { n, seq, brute } => {
            let result = if *brute {
                let small = n.to_u64().ok_or_else(|| {
                    Error::InvalidArgument("the brute oracle needs n to fit in 64 bits".into())
                })?;
                brute_member(small, seq, limits)?
            } else {
                is_member(n, seq, limits)?
            };
            Ok(Report::Member { result })
        }
        Command::Witness { seq, exact_check } => {
            let certificate = find_witness(seq, limits)?;
            let report = verify_witness(&certificate, seq, limits, *exact_check)?;
            Ok(Report::Witness {
                certificate,
                report,
            })
        }
        Command::Count {
            seq,
            limit,
            checkpoints,
        } => Ok(Report::Count {
            rows: count_members(seq, *limit, checkpoints, limits)?,
        }),
        Command::Cyclotomic { n, trunc } => match trunc {
            Some(order) => Ok(Report::Cyclotomic {
                coefficients: cyclotomic_trunc(*n, *order)?.coeffs().to_vec(),
                reach: Reach::Order(*order),
            }),
            None => {
                let poly = cyclotomic_exact(*n)?;
                let degree = poly.degree().unwrap_or(0);
                Ok(Report::Cyclotomic {
                    coefficients: poly.coeffs().to_vec(),
                    reach: Reach::Degree(degree),
                })
            }
        },
        Command::Selftest => Ok(Report::Selftest {
            cases: selftest::run(),
        }),
    }
}

/// Self-test failures surface as the internal exit code; everything else
/// that produced a report exits cleanly.
fn exit_code_for(report: &Report) -> i32 {
    match report {
        Report::Selftest { cases } if cases.iter().any(|case| !case.passed) => 3,
        _ => 0,
    }
}

fn classify(error: &Error) -> (&'static str, i32) {
    if error.is_internal() {
        ("internal", 3)
    } else if error.is_resource_limit() {
        ("resource_cap", 2)
    } else {
        ("domain_error", 1)
    }
}
