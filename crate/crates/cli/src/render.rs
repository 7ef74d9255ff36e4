use asymmetry::combinat::CombObject;
use asymmetry::series::{Poly, Rational};
use num_traits::{One, Signed};
use serde_json::Value;

/// `3*t^2*x - 1/2*u + 7`, variables named by `names` in exponent order.
pub fn poly(p: &Poly, names: &[&str]) -> String {
    let mut out = String::new();
    for (exps, c) in p.iter() {
        let mono = monomial(names, exps);
        let mag = c.abs();
        let body = match (mono.is_empty(), mag.is_one()) {
            (true, _) => mag.to_string(),
            (false, true) => mono,
            (false, false) => format!("{mag}*{mono}"),
        };
        match (out.is_empty(), c.is_negative()) {
            (true, false) => out.push_str(&body),
            (true, true) => out.push_str(&format!("-{body}")),
            (false, false) => out.push_str(&format!(" + {body}")),
            (false, true) => out.push_str(&format!(" - {body}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn monomial(names: &[&str], exps: &[u32]) -> String {
    let parts: Vec<String> = names
        .iter()
        .zip(exps)
        .filter(|(_, &e)| e > 0)
        .map(|(n, &e)| {
            if e == 1 {
                n.to_string()
            } else {
                format!("{n}^{e}")
            }
        })
        .collect();
    parts.join("*")
}

/// Parses `t2,x2` or `t^2*x^2` into `(name, exponent)` pairs. A bare digit suffix is read against the longest matching name,
/// so `x002` is `x00^2` when `x00` is a variable.
pub fn parse_monomial(text: &str, names: &[&str]) -> Result<Vec<(String, u32)>, String> {
    let mut out: Vec<(String, u32)> = Vec::new();
    for tok in text
        .split([',', '*'])
        .map(str::trim)
        .filter(|t| !t.is_empty())
    {
        let (name, e) = match tok.split_once('^') {
            Some((n, e)) => (n.trim().to_string(), parse_exp(tok, e.trim())?),
            None => {
                let name = names
                    .iter()
                    .filter(|n| {
                        tok.starts_with(**n) && tok[n.len()..].chars().all(|c| c.is_ascii_digit())
                    })
                    .max_by_key(|n| n.len())
                    .ok_or_else(|| {
                        format!(
                            "`{tok}` does not name a variable (variables: {})",
                            names.join(", ")
                        )
                    })?;
                let rest = &tok[name.len()..];
                let e = if rest.is_empty() {
                    1
                } else {
                    parse_exp(tok, rest)?
                };
                (name.to_string(), e)
            }
        };
        if !names.contains(&name.as_str()) {
            return Err(format!(
                "unknown variable `{name}` (variables: {})",
                names.join(", ")
            ));
        }
        match out.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 += e,
            None => out.push((name, e)),
        }
    }
    Ok(out)
}

fn parse_exp(tok: &str, e: &str) -> Result<u32, String> {
    e.parse().map_err(|_| format!("bad exponent in `{tok}`"))
}

/// `name=value` with a rational value.
pub fn parse_assignment(text: &str) -> Result<(String, Rational), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("`{text}` is not of the form var=value"))?;
    let v: Rational = value
        .trim()
        .parse()
        .map_err(|_| format!("`{value}` is not a rational number"))?;
    Ok((name.trim().to_string(), v))
}

/// One-line plain form of an object.
pub fn object(o: &CombObject) -> String {
    match o {
        CombObject::Matching(m) => m.to_string(),
        other => match other.to_json() {
            Value::String(s) => s,
            Value::Array(xs) if xs.iter().all(Value::is_number) => xs
                .iter()
                .map(Value::to_string)
                .collect::<Vec<_>>()
                .join(","),
            v => v.to_string(),
        },
    }
}

pub fn set<'a>(items: impl IntoIterator<Item = &'a u32>) -> String {
    let v: Vec<String> = items.into_iter().map(u32::to_string).collect();
    format!("{{{}}}", v.join(","))
}

pub fn list(items: &[u32]) -> String {
    items
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomials() {
        let names = ["x00", "x11", "x10", "x01", "x"];
        assert_eq!(
            parse_monomial("x002,x", &names).unwrap(),
            vec![("x00".into(), 2), ("x".into(), 1)]
        );
        assert_eq!(
            parse_monomial("x^3*x01", &names).unwrap(),
            vec![("x".into(), 3), ("x01".into(), 1)]
        );
        assert!(parse_monomial("y2", &names).is_err());
        assert!(parse_monomial("x^a", &names).is_err());
    }

    #[test]
    fn assignments() {
        assert_eq!(parse_assignment("s=1/2").unwrap().1.to_string(), "1/2");
        assert!(parse_assignment("s").is_err());
        assert!(parse_assignment("s=half").is_err());
    }
}
