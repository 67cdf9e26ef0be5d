//! Number formatting shared by the CSV and text writers.

/// Round-trippable CSV representation with 17 significant digits.
pub fn csv_num(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x:.16e}")
}

/// Optional value as a CSV field; undefined values are left empty.
pub fn csv_opt(x: Option<f64>) -> String {
    x.map(csv_num).unwrap_or_default()
}

/// Human-readable value with 6 significant digits.
pub fn human_num(x: f64) -> String {
    if !x.is_finite() {
        return csv_num(x);
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn human_opt(x: Option<f64>) -> String {
    x.map(human_num).unwrap_or_else(|| "undefined".to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 123456789.123, f64::MIN_POSITIVE] {
            let s = csv_num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(csv_opt(None), "");
    }

    #[test]
    fn human_six_digits() {
        assert_eq!(human_num(3.2222222222), "3.22222");
        assert_eq!(human_num(2.0), "2");
        assert_eq!(human_num(14.5), "14.5");
        assert_eq!(human_num(0.70459321), "0.704593");
        assert_eq!(human_num(-0.0155), "-0.0155");
        assert_eq!(human_num(1.5e-7), "1.50000e-7");
        assert_eq!(human_opt(None), "undefined");
    }
}
