//! Parsing of collective-coordinate expressions such as `q1-q2`,
//! `(p1+p2)/2` or `(q1-q2)/sqrt2`.

use phasecorr_core::composite::{LinearForm, MODE_VARIABLES};

fn number(s: &str) -> Result<f64, String> {
    match s {
        "sqrt2" => Ok(std::f64::consts::SQRT_2),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite() && *v != 0.0)
            .ok_or_else(|| format!("bad number `{s}`")),
    }
}

fn variable(s: &str) -> Result<LinearForm, String> {
    let k = MODE_VARIABLES
        .iter()
        .position(|v| *v == s)
        .ok_or_else(|| format!("unknown variable `{s}` (expected q1, q2, p1 or p2)"))?;
    let mut c = [0.0; 4];
    c[k] = 1.0;
    Ok(LinearForm::new(c))
}

/// `[c*]var` terms joined by `+`/`-`.
fn sum(s: &str) -> Result<LinearForm, String> {
    if s.is_empty() {
        return Err("empty expression".into());
    }
    let mut total = LinearForm::new([0.0; 4]);
    let mut start = 0;
    let bytes = s.as_bytes();
    for end in 1..=s.len() {
        if end < s.len() && !matches!(bytes[end], b'+' | b'-') {
            continue;
        }
        let term = &s[start..end];
        let (sign, body) = match term.as_bytes()[0] {
            b'-' => (-1.0, &term[1..]),
            b'+' => (1.0, &term[1..]),
            _ => (1.0, term),
        };
        let form = match body.split_once('*') {
            Some((c, v)) => variable(v)?.scaled(number(c)?),
            None => variable(body)?,
        };
        total = total.plus(form.scaled(sign));
        start = end;
    }
    Ok(total)
}

pub fn parse_form(text: &str) -> Result<LinearForm, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let (body, divisor) = match s.rsplit_once('/') {
        Some((b, d)) => (b, number(d)?),
        None => (s.as_str(), 1.0),
    };
    let (scale, body) = match body.find('(') {
        Some(0) => (1.0, body),
        Some(open) => {
            let c = body[..open]
                .strip_suffix('*')
                .ok_or_else(|| format!("expected `*` before `(` in `{text}`"))?;
            (number(c)?, &body[open..])
        }
        None => (1.0, body),
    };
    let inner = match body.strip_prefix('(') {
        Some(rest) => rest
            .strip_suffix(')')
            .ok_or_else(|| format!("unbalanced parentheses in `{text}`"))?,
        None => body,
    };
    if inner.contains(['(', ')', '/']) {
        return Err(format!("cannot parse `{text}`"));
    }
    let form = sum(inner)?.scaled(scale / divisor);
    if form.coefficients.iter().all(|&c| c == 0.0) {
        return Err(format!("`{text}` is identically zero"));
    }
    Ok(form)
}

/// `"x,y"` into two forms.
pub fn parse_pair(text: &str) -> Result<(LinearForm, LinearForm), String> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated coordinates, got `{text}`"))?;
    Ok((parse_form(a)?, parse_form(b)?))
}
