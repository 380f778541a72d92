//! Group elements written as words in the generator names (`a^2 b`,
//! `x*y^-1`, `e`) or as coordinates: `(x, y, z)` in the Heisenberg group,
//! `(v_1, ..., v_n; k)` in `Z^n ⋊ F` with `k` an element name of `F`.

use num_bigint::BigInt;

use super::expr::ExprError;
use crate::groups::{GroupContext, GroupElement};

fn err(offset: usize, message: impl Into<String>, expected: Vec<&'static str>) -> ExprError {
    ExprError {
        offset,
        message: message.into(),
        expected,
    }
}

fn parse_int(s: &str, offset: usize) -> Result<BigInt, ExprError> {
    s.trim()
        .replace('−', "-")
        .parse()
        .map_err(|_| err(offset, format!("`{}` is not an integer", s.trim()), vec!["integer"]))
}

pub fn parse_element(ctx: &GroupContext, src: &str) -> Result<GroupElement, ExprError> {
    let text = src.trim();
    let lead = src.len() - src.trim_start().len();
    if text.starts_with('(') && text.ends_with(')') && (text.contains(',') || text.contains(';')) {
        return parse_tuple(ctx, text, lead);
    }
    parse_word(ctx, src)
}

fn parse_tuple(ctx: &GroupContext, text: &str, lead: usize) -> Result<GroupElement, ExprError> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| err(lead, "malformed coordinate tuple", vec!["`(`", "`)`"]))?;
    let (coords, finite) = match inner.split_once(';') {
        Some((c, k)) => (c, Some(k.trim())),
        None => (inner, None),
    };
    let values = coords
        .split(',')
        .map(|c| parse_int(c, lead + 1))
        .collect::<Result<Vec<_>, _>>()?;
    let g = match (ctx.finite(), finite) {
        (None, None) if values.len() == 3 => {
            GroupElement::heisenberg(values[0].clone(), values[1].clone(), values[2].clone())
        }
        (Some(table), k) => {
            let f = match k {
                None => 0,
                Some(name) => table
                    .element(name)
                    .or_else(|| name.strip_prefix('f').and_then(|n| n.parse().ok()).filter(|&n| n < table.order()))
                    .ok_or_else(|| err(lead, format!("unknown finite element `{name}`"), vec!["element name"]))?,
            };
            GroupElement::Lattice { v: values, f }
        }
        _ => return Err(err(lead, "coordinate tuple does not match the group", vec![])),
    };
    ctx.check(&g).map_err(|e| err(lead, e.to_string(), vec![]))?;
    Ok(g)
}

fn parse_word(ctx: &GroupContext, src: &str) -> Result<GroupElement, ExprError> {
    let chars: Vec<(usize, char)> = src.chars().enumerate().collect();
    let names = ctx.generator_names();
    let mut acc = ctx.identity();
    let mut k = 0;
    let mut factors = 0;
    while k < chars.len() {
        let (off, c) = chars[k];
        if c.is_whitespace() || c == '*' || c == '·' {
            k += 1;
            continue;
        }
        if !(c.is_alphanumeric() || c == '_') {
            return Err(err(off, format!("unexpected character `{c}`"), vec!["generator name"]));
        }
        let start = k;
        while k < chars.len() && (chars[k].1.is_alphanumeric() || chars[k].1 == '_') {
            k += 1;
        }
        let name: String = chars[start..k].iter().map(|c| c.1).collect();
        let g = if name == "e" || name == "1" {
            ctx.identity()
        } else {
            let j = names.iter().position(|n| *n == name).ok_or_else(|| {
                let mut expected: Vec<&'static str> = vec!["generator name"];
                expected.push("`e`");
                err(off, format!("unknown generator `{name}` (generators: {})", names.join(", ")), expected)
            })?;
            ctx.generators()[j].clone()
        };
        let mut exp = BigInt::from(1);
        if k < chars.len() && chars[k].1 == '^' {
            k += 1;
            let estart = k;
            let paren = k < chars.len() && chars[k].1 == '(';
            if paren {
                k += 1;
            }
            let dstart = k;
            if k < chars.len() && (chars[k].1 == '-' || chars[k].1 == '−') {
                k += 1;
            }
            while k < chars.len() && chars[k].1.is_ascii_digit() {
                k += 1;
            }
            let digits: String = chars[dstart..k].iter().map(|c| c.1).collect();
            let eoff = chars.get(estart).map_or(chars.len(), |c| c.0);
            exp = parse_int(&digits, eoff)?;
            if paren {
                if k < chars.len() && chars[k].1 == ')' {
                    k += 1;
                } else {
                    return Err(err(chars.get(k).map_or(chars.len(), |c| c.0), "unclosed exponent", vec!["`)`"]));
                }
            }
        }
        acc = ctx.mul(&acc, &ctx.power(&g, &exp));
        factors += 1;
    }
    if factors == 0 {
        return Err(err(chars.len(), "empty element", vec!["generator name", "`e`"]));
    }
    Ok(acc)
}
