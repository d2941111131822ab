//! Unit-suffixed command-line quantities. Times accept `s`/`ns`, fields
//! `T`/`mT`; a bare number is taken in the canonical unit (s or T).

fn split_suffix<'a>(text: &'a str, suffixes: &[&str]) -> (&'a str, Option<&'a str>) {
    let text = text.trim();
    // longest suffix first so "ns" wins over "s"
    for suffix in suffixes {
        if let Some(num) = text.strip_suffix(suffix) {
            return (num.trim_end(), Some(&text[text.len() - suffix.len()..]));
        }
    }
    (text, None)
}

fn parse_number(text: &str, what: &str) -> Result<f64, String> {
    let v: f64 = text.parse().map_err(|_| format!("invalid {what} '{text}'"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{what} must be finite"))
    }
}

/// Time in seconds.
pub fn parse_time(text: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(text, &["ns", "s"]);
    let scale = match unit {
        Some("ns") => 1e-9,
        _ => 1.0,
    };
    Ok(parse_number(num, "time")? * scale)
}

/// Field in tesla.
pub fn parse_field(text: &str) -> Result<f64, String> {
    let (num, unit) = split_suffix(text, &["mT", "T"]);
    let scale = match unit {
        Some("mT") => 1e-3,
        _ => 1.0,
    };
    Ok(parse_number(num, "field")? * scale)
}

/// Plain finite number.
pub fn parse_finite(text: &str) -> Result<f64, String> {
    parse_number(text.trim(), "number")
}
