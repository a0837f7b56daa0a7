use hypercube_spectra::{make_family, BooleanFunction, CoordSet, Error, FamilySpec, Result};

use crate::args::FunctionArgs;

pub fn load(args: &FunctionArgs) -> Result<BooleanFunction> {
    match (&args.hex, &args.family) {
        (Some(hex), None) => {
            let n = args.n.ok_or_else(|| Error::InvalidParameter("--fn needs --n".into()))?;
            BooleanFunction::from_hex(n, hex)
        }
        (None, Some(spec)) => make_family(&spec.parse::<FamilySpec>()?),
        _ => Err(Error::InvalidParameter("give either --fn HEX --n N or --family SPEC".into())),
    }
}

/// `start:end:step` (end included up to rounding) or a comma list.
pub fn parse_reals(text: &str) -> Result<Vec<f64>> {
    let bad = |s: &str| Error::InvalidParameter(format!("not a number: '{s}'"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad(s));
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if step.is_nan() || step <= 0.0 || b < a {
                return Err(Error::InvalidParameter(format!("bad range '{text}'")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| a + i as f64 * step).collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => Err(Error::InvalidParameter(format!("bad list '{text}'"))),
    }
}

pub fn parse_coords(text: &str, n: usize) -> Result<CoordSet> {
    let t = text.trim();
    let set = if t.eq_ignore_ascii_case("all") {
        CoordSet::full(n)
    } else if let Some(hex) = t.strip_prefix("0x") {
        CoordSet::from_mask(u32::from_str_radix(hex, 16).map_err(|_| bad_set(t))?)
    } else if let Some(bin) = t.strip_prefix("0b") {
        CoordSet::from_mask(u32::from_str_radix(bin, 2).map_err(|_| bad_set(t))?)
    } else if t.contains(',') || t.starts_with('{') {
        let coords = t
            .trim_matches(|c| c == '{' || c == '}')
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<usize>().map_err(|_| bad_set(t)))
            .collect::<Result<Vec<_>>>()?;
        CoordSet::from_coords(&coords)?
    } else {
        CoordSet::from_mask(t.parse::<u32>().map_err(|_| bad_set(t))?)
    };
    set.check_within(n)?;
    Ok(set)
}

fn bad_set(t: &str) -> Error {
    Error::InvalidParameter(format!("not a coordinate set: '{t}'"))
}

pub fn parse_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| Error::InvalidParameter(format!("not an integer: '{s}'"))))
        .collect()
}
