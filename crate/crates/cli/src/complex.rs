use num_complex::Complex64;

/// Parses `x`, `yi`, `i`, `-i` or `x±yi`.
pub fn parse_complex(raw: &str) -> Result<Complex64, String> {
    let s: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("`{raw}` is not a complex number (use forms like 0.5, -i, 0.6+0.8i)");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s
            .parse::<f64>()
            .map(|x| Complex64::new(x, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re.parse::<f64>().map_err(|_| bad())?;
    Ok(Complex64::new(re, im))
}

/// Comma-separated complex literals.
#[derive(Clone, Debug)]
pub struct ComplexList(pub Vec<Complex64>);

pub fn parse_list(raw: &str) -> Result<ComplexList, String> {
    raw.split(',')
        .map(parse_complex)
        .collect::<Result<_, _>>()
        .map(ComplexList)
}
