//! Text forms of symbols and Blaschke products.
//!
//! Complex numbers are written `(re,im)` or as a bare real. Blaschke
//! products are `zeros:[(re,im,m),...]` with an optional `;arg:x` for the
//! unimodular factor `e^{ix}`.

use std::fmt;
use std::str::FromStr;

use hm_core::{BlaschkeProduct, MoebiusMap, Symbol};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ParseError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError(msg.into()))
}

fn parse_real(s: &str) -> Result<f64, ParseError> {
    let t = s.trim();
    match t.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => err(format!("`{t}` is not a finite real number")),
    }
}

/// Splits on `sep` outside parentheses and brackets.
fn split_top(s: &str, sep: char) -> Result<Vec<&str>, ParseError> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return err(format!("unbalanced `{ch}` in `{s}`"));
                }
            }
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    if depth != 0 {
        return err(format!("unbalanced brackets in `{s}`"));
    }
    parts.push(&s[start..]);
    Ok(parts)
}

fn parens(s: &str) -> Option<&str> {
    s.trim().strip_prefix('(')?.strip_suffix(')')
}

pub fn parse_complex(s: &str) -> Result<Complex64, ParseError> {
    match parens(s) {
        Some(inner) => {
            let parts = split_top(inner, ',')?;
            if parts.len() != 2 {
                return err(format!("complex number `{}` needs exactly two parts", s.trim()));
            }
            Ok(Complex64::new(parse_real(parts[0])?, parse_real(parts[1])?))
        }
        None => Ok(Complex64::new(parse_real(s)?, 0.0)),
    }
}

fn parse_complex_list(s: &str, what: &str) -> Result<Vec<Complex64>, ParseError> {
    if s.trim().is_empty() {
        return err(format!("{what} needs at least one coefficient"));
    }
    split_top(s, ',')?.into_iter().map(parse_complex).collect()
}

pub fn fmt_complex(z: Complex64) -> String {
    format!("({},{})", z.re, z.im)
}

fn fmt_list(v: &[Complex64]) -> String {
    v.iter().map(|&z| fmt_complex(z)).collect::<Vec<_>>().join(",")
}

/// Zeros with multiplicities plus an optional unimodular argument.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSpec {
    pub zeros: Vec<(Complex64, u32)>,
    pub arg: Option<f64>,
}

impl ThetaSpec {
    pub fn to_blaschke(&self) -> hm_core::Result<BlaschkeProduct> {
        BlaschkeProduct::new(self.arg.unwrap_or(0.0), &self.zeros)
    }
}

impl FromStr for ThetaSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        let s = s.strip_prefix("blaschke:").unwrap_or(s);
        let mut sections = split_top(s, ';')?.into_iter();
        let head = sections.next().unwrap_or_default().trim();
        let Some(list) = head.strip_prefix("zeros:") else {
            return err(format!("expected `zeros:[...]`, got `{head}`"));
        };
        let Some(list) = list.trim().strip_prefix('[').and_then(|l| l.strip_suffix(']')) else {
            return err("zero list must be enclosed in `[...]`");
        };
        let mut zeros = Vec::new();
        if !list.trim().is_empty() {
            for item in split_top(list, ',')? {
                let Some(inner) = parens(item) else {
                    return err(format!("zero `{}` must be a triple (re,im,m)", item.trim()));
                };
                let parts = split_top(inner, ',')?;
                if parts.len() != 3 {
                    return err(format!("zero `{}` must be a triple (re,im,m)", item.trim()));
                }
                let m: u32 = parts[2]
                    .trim()
                    .parse()
                    .map_err(|_| ParseError(format!("multiplicity `{}` is not a nonnegative integer", parts[2].trim())))?;
                if m == 0 {
                    return err("multiplicity must be positive");
                }
                zeros.push((Complex64::new(parse_real(parts[0])?, parse_real(parts[1])?), m));
            }
        }
        let mut arg = None;
        for sec in sections {
            match sec.trim().strip_prefix("arg:") {
                Some(v) if arg.is_none() => arg = Some(parse_real(v)?),
                Some(_) => return err("`arg` given twice"),
                None => return err(format!("unknown section `{}`", sec.trim())),
            }
        }
        Ok(Self { zeros, arg })
    }
}

impl fmt::Display for ThetaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.zeros.iter().map(|(a, m)| format!("({},{},{m})", a.re, a.im)).collect();
        write!(f, "zeros:[{}]", parts.join(","))?;
        if let Some(x) = self.arg {
            write!(f, ";arg:{x}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    /// `(az + b)/(cz + d)`.
    Lft([Complex64; 4]),
    /// `a + bz`.
    Affine(Complex64, Complex64),
    /// Coefficients, lowest degree first.
    Polynomial(Vec<Complex64>),
    Blaschke(ThetaSpec),
    Constant(Complex64),
    Identity,
    /// `((2 - α)z + α)/(-αz + (2 + α))`.
    PhiAlpha(Complex64),
}

impl SymbolSpec {
    pub fn to_symbol(&self) -> hm_core::Result<Symbol> {
        Ok(match self {
            SymbolSpec::Polynomial(c) => Symbol::polynomial(c)?,
            SymbolSpec::Blaschke(t) => Symbol::Blaschke(t.to_blaschke()?),
            SymbolSpec::Constant(c) => Symbol::Constant(*c),
            _ => Symbol::Lft(self.to_lft()?),
        })
    }

    /// The symbol as a linear fractional map, if it is one.
    pub fn to_lft(&self) -> hm_core::Result<MoebiusMap> {
        match self {
            SymbolSpec::Lft([a, b, c, d]) => MoebiusMap::new(*a, *b, *c, *d),
            SymbolSpec::Affine(a, b) => MoebiusMap::affine(*b, *a),
            SymbolSpec::Identity => Ok(MoebiusMap::identity()),
            SymbolSpec::PhiAlpha(alpha) => MoebiusMap::phi_alpha(*alpha),
            _ => Err(hm_core::Error::InvalidArgument(format!("`{self}` is not a linear fractional map"))),
        }
    }
}

impl FromStr for SymbolSpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let s = s.trim();
        let Some((kind, payload)) = s.split_once(':') else {
            return err(format!("`{s}` has no kind prefix (lft:, affine:, poly:, constant:, blaschke:, preset:)"));
        };
        match kind {
            "lft" => {
                let v = parse_complex_list(payload, "lft")?;
                let [a, b, c, d] = v[..] else {
                    return err(format!("lft needs 4 coefficients, got {}", v.len()));
                };
                Ok(SymbolSpec::Lft([a, b, c, d]))
            }
            "affine" => {
                let v = parse_complex_list(payload, "affine")?;
                let [a, b] = v[..] else {
                    return err(format!("affine needs 2 coefficients, got {}", v.len()));
                };
                Ok(SymbolSpec::Affine(a, b))
            }
            "poly" | "polynomial" => Ok(SymbolSpec::Polynomial(parse_complex_list(payload, "poly")?)),
            "constant" => Ok(SymbolSpec::Constant(parse_complex(payload)?)),
            "blaschke" | "zeros" => Ok(SymbolSpec::Blaschke(if kind == "zeros" { s.parse()? } else { payload.parse()? })),
            "preset" => match payload.trim().split_once(':') {
                None if payload.trim() == "identity" => Ok(SymbolSpec::Identity),
                Some(("phi_alpha", a)) => Ok(SymbolSpec::PhiAlpha(parse_complex(a)?)),
                _ => err(format!("unknown preset `{}` (identity, phi_alpha:<α>)", payload.trim())),
            },
            other => err(format!("unknown symbol kind `{other}`")),
        }
    }
}

impl fmt::Display for SymbolSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolSpec::Lft(c) => write!(f, "lft:{}", fmt_list(c)),
            SymbolSpec::Affine(a, b) => write!(f, "affine:{},{}", fmt_complex(*a), fmt_complex(*b)),
            SymbolSpec::Polynomial(c) => write!(f, "poly:{}", fmt_list(c)),
            SymbolSpec::Blaschke(t) => write!(f, "blaschke:{t}"),
            SymbolSpec::Constant(c) => write!(f, "constant:{}", fmt_complex(*c)),
            SymbolSpec::Identity => write!(f, "preset:identity"),
            SymbolSpec::PhiAlpha(a) => write!(f, "preset:phi_alpha:{}", fmt_complex(*a)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("0.5").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex(" (1e-3, -2) ").unwrap(), Complex64::new(1e-3, -2.0));
        assert!(parse_complex("(1,2,3)").is_err());
        assert!(parse_complex("nan").is_err());
        assert!(parse_complex("(1,").is_err());
    }

    #[test]
    fn theta_forms() {
        let t: ThetaSpec = "zeros:[(0,0,1),(0.5,0,1)]".parse().unwrap();
        assert_eq!(t.zeros.len(), 2);
        assert_eq!(t.arg, None);
        let t: ThetaSpec = "blaschke:zeros:[(0.1,-0.2,2)];arg:1.5".parse().unwrap();
        assert_eq!(t.arg, Some(1.5));
        assert_eq!(t.to_string(), "zeros:[(0.1,-0.2,2)];arg:1.5");
        assert!("zeros:[]".parse::<ThetaSpec>().unwrap().zeros.is_empty());
        assert!("zeros:[(0,0,0)]".parse::<ThetaSpec>().is_err());
        assert!("zeros:[(0,0)]".parse::<ThetaSpec>().is_err());
        assert!("zeros:[(0,0,1)];gamma:1".parse::<ThetaSpec>().is_err());
    }

    #[test]
    fn symbol_forms() {
        let s: SymbolSpec = "lft:2,0,-1,4".parse().unwrap();
        assert!(matches!(s.to_symbol().unwrap(), Symbol::Lft(_)));
        let s: SymbolSpec = "poly:0,0.333,0.333".parse().unwrap();
        assert!(matches!(s.to_symbol().unwrap(), Symbol::Series(_)));
        let s: SymbolSpec = "affine:(0.1,0.1),0.5".parse().unwrap();
        let m = s.to_lft().unwrap();
        let z = Complex64::new(0.2, 0.3);
        assert!((m.eval(z).unwrap() - (Complex64::new(0.1, 0.1) + 0.5 * z)).norm() < 1e-15);
        assert_eq!("preset:identity".parse::<SymbolSpec>().unwrap(), SymbolSpec::Identity);
        assert!(matches!("preset:phi_alpha:(0.3,0)".parse::<SymbolSpec>().unwrap(), SymbolSpec::PhiAlpha(_)));
        assert!(matches!("constant:0.2".parse::<SymbolSpec>().unwrap().to_symbol().unwrap(), Symbol::Constant(_)));
        assert!(matches!("zeros:[(0.5,0,1)]".parse::<SymbolSpec>().unwrap(), SymbolSpec::Blaschke(_)));
        assert!("lft:1,2,3".parse::<SymbolSpec>().is_err());
        assert!("mobius:1,2,3,4".parse::<SymbolSpec>().is_err());
        assert!("poly:0,0,1".parse::<SymbolSpec>().unwrap().to_lft().is_err());
    }
}
