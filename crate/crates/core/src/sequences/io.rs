//! Plain-text sequence files.
//!
//! ```text
//! # comments start with '#'
//! scheme: PC
//! label: UP1
//! G 0.5 0.25      # global pulse: area/π phase/π
//! Z 1.5           # local Z rotation: angle/π
//! ```
//!
//! All angles are in units of π.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use super::{ControlScheme, PulseElement, PulseSequence};
use crate::error::{Error, Result};

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_number(tok: &str, line: usize) -> Result<f64> {
    let v: f64 = tok.parse().map_err(|_| parse_err(line, format!("'{tok}' is not a number")))?;
    if !v.is_finite() {
        return Err(parse_err(line, format!("'{tok}' is not finite")));
    }
    Ok(v)
}

pub fn parse_sequence(text: &str) -> Result<PulseSequence> {
    let mut scheme: Option<ControlScheme> = None;
    let mut label = String::new();
    let mut elements = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some((key, value)) = content.split_once(':') {
            match key.trim().to_ascii_lowercase().as_str() {
                "scheme" => {
                    if scheme.is_some() {
                        return Err(parse_err(line, "duplicate scheme header"));
                    }
                    if !elements.is_empty() {
                        return Err(parse_err(line, "scheme header must precede the elements"));
                    }
                    scheme = Some(value.parse().map_err(|e: Error| parse_err(line, e.to_string()))?);
                }
                "label" => label = value.trim().to_string(),
                other => return Err(parse_err(line, format!("unknown header '{other}'"))),
            }
            continue;
        }

        let toks: Vec<&str> = content.split_whitespace().collect();
        let element = match toks.as_slice() {
            ["G" | "g", theta, phi] => {
                let theta = parse_number(theta, line)? * PI;
                let phi = parse_number(phi, line)? * PI;
                PulseElement::global(theta, phi)
            }
            ["Z" | "z", angle] => PulseElement::z(parse_number(angle, line)? * PI),
            [kind, ..] if matches!(*kind, "G" | "g" | "Z" | "z") => {
                return Err(parse_err(line, format!("wrong number of fields for '{kind}'")))
            }
            _ => return Err(parse_err(line, format!("unrecognized line '{content}'"))),
        };
        let Some(s) = scheme else {
            return Err(parse_err(line, "missing 'scheme:' header before the first element"));
        };
        if s != ControlScheme::ZC && !element.is_global() {
            return Err(parse_err(line, format!("{s} sequences cannot contain Z rotations")));
        }
        elements.push(element);
    }

    let scheme = scheme.ok_or_else(|| parse_err(0, "missing 'scheme:' header"))?;
    PulseSequence::try_new(scheme, elements, label).map_err(|e| parse_err(0, e.to_string()))
}

fn fmt_pi(v: f64) -> String {
    let x = v / PI;
    if x != 0.0 && x.abs() < 1e-3 {
        format!("{x:.15e}")
    } else {
        format!("{x:.15}")
    }
}

pub fn format_sequence(seq: &PulseSequence) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "scheme: {}", seq.scheme());
    if !seq.label().is_empty() {
        let _ = writeln!(out, "label: {}", seq.label());
    }
    for e in seq.elements() {
        let _ = match *e {
            PulseElement::Global { theta, phi } => writeln!(out, "G {} {}", fmt_pi(theta), fmt_pi(phi)),
            PulseElement::LocalZ { angle } => writeln!(out, "Z {}", fmt_pi(angle)),
        };
    }
    out
}

pub fn read_sequence_file(path: &Path) -> Result<PulseSequence> {
    parse_sequence(&std::fs::read_to_string(path)?)
}

/// Writes `contents` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let name =
        path.file_name().ok_or_else(|| Error::InvalidArgument(format!("'{}' is not a file path", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    Ok(result?)
}

pub fn write_sequence_file(path: &Path, seq: &PulseSequence) -> Result<()> {
    write_atomic(path, format_sequence(seq).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{basic_zc, evaluate};
    use crate::su2::{trace_overlap, ErrorParams};

    #[test]
    fn round_trip() {
        let seq = basic_zc(0.3, 1.2, 2.9).with_label("demo");
        let back = parse_sequence(&format_sequence(&seq)).unwrap();
        assert_eq!(back.label(), "demo");
        assert_eq!(back.len(), seq.len());
        let err = ErrorParams::new(0.02, 0.01, 0.03);
        assert!(trace_overlap(evaluate(&back, err), evaluate(&seq, err)) > 1.0 - 1e-15);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let text = "scheme: PC\nG 0.5 0\nG 0.5\n";
        match parse_sequence(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_sequence("G 1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_sequence("scheme: AC\nZ 1\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_sequence("scheme: PC\nG x 0\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn comments_and_blank_lines() {
        let s = parse_sequence("# hi\n\nscheme: zc  # trailing\nZ 0.5\n  g 1 0.5\n").unwrap();
        assert_eq!(s.scheme(), ControlScheme::ZC);
        assert_eq!(s.len(), 2);
    }
}
