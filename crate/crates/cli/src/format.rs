//! Locale-free number formatting for CSV output.

/// Nine significant digits. Plain notation for magnitudes in [1e-4, 1e9),
/// scientific otherwise.
pub fn sig9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let x = if x == 0.0 { 0.0 } else { x };
    let sci = format!("{x:.8e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if x == 0.0 {
        return format!("{:.8}", 0.0);
    }
    if (-4..9).contains(&exp) {
        format!("{x:.*}", (8 - exp) as usize)
    } else {
        sci
    }
}

pub fn csv_row<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut line = fields
        .into_iter()
        .map(|s| s.as_ref().to_string())
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}
