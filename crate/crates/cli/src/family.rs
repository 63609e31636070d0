//! Parametric function families for random search.
//!
//! A family lists rational parameters with sampling ranges and describes a
//! continuous function by breakpoint and value expressions that are affine in
//! those parameters, e.g. `"1/4 + 3/10*lam"`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use groupcut::{PwlPeriodic, Rational};
use serde::{Deserialize, Serialize};

use crate::rng::Lcg64;
use crate::CliError;

const SAMPLE_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParameterRange {
    pub name: String,
    pub min: Rational,
    pub max: Rational,
    pub max_denominator: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub parameters: Vec<ParameterRange>,
    pub breakpoints: Vec<String>,
    pub values: Vec<String>,
    /// Each expression must evaluate to a nonnegative number.
    #[serde(default)]
    pub constraints: Vec<String>,
}

/// `constant + Σ coeff · name`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineExpr {
    pub constant: Rational,
    pub coeffs: BTreeMap<String, Rational>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Number(Rational),
    Ident(String),
    Plus,
    Minus,
    Star,
}

fn tokenize(s: &str) -> Result<Vec<Token>, String> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push(Token::Plus);
                i += 1;
            }
            '-' => {
                out.push(Token::Minus);
                i += 1;
            }
            '*' => {
                out.push(Token::Star);
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let r = Rational::from_str(&text).map_err(|_| format!("bad number {text:?}"))?;
                out.push(Token::Number(r));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Token::Ident(chars[start..i].iter().collect()));
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(out)
}

impl FromStr for AffineExpr {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let s = s.strip_suffix(">= 0").or_else(|| s.strip_suffix("≥ 0")).unwrap_or(s);
        let tokens = tokenize(s)?;
        if tokens.is_empty() {
            return Err("empty expression".into());
        }
        let mut expr = AffineExpr {
            constant: Rational::zero(),
            coeffs: BTreeMap::new(),
        };
        let mut it = tokens.into_iter().peekable();
        let mut first = true;
        while it.peek().is_some() {
            let mut sign = Rational::one();
            match it.peek() {
                Some(Token::Plus) => {
                    it.next();
                }
                Some(Token::Minus) => {
                    it.next();
                    sign = -sign;
                }
                _ if !first => return Err("expected + or -".into()),
                _ => {}
            }
            first = false;
            let mut coeff = sign;
            let mut name: Option<String> = None;
            loop {
                match it.next() {
                    Some(Token::Number(r)) => coeff *= &r,
                    Some(Token::Ident(n)) if name.is_none() => name = Some(n),
                    Some(Token::Ident(n)) => return Err(format!("term is not affine at {n:?}")),
                    _ => return Err("expected a number or a parameter name".into()),
                }
                if it.peek() == Some(&Token::Star) {
                    it.next();
                } else {
                    break;
                }
            }
            match name {
                Some(n) => {
                    let e = expr.coeffs.entry(n).or_insert_with(Rational::zero);
                    *e += &coeff;
                }
                None => expr.constant += &coeff,
            }
        }
        expr.coeffs.retain(|_, c| !c.is_zero());
        Ok(expr)
    }
}

impl AffineExpr {
    pub fn eval(&self, params: &BTreeMap<String, Rational>) -> Option<Rational> {
        let mut v = self.constant.clone();
        for (name, c) in &self.coeffs {
            v += &(c * params.get(name)?);
        }
        Some(v)
    }
}

impl fmt::Display for AffineExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        for (name, c) in &self.coeffs {
            if c.is_negative() {
                write!(f, " - {}*{name}", -c.clone())?;
            } else {
                write!(f, " + {c}*{name}")?;
            }
        }
        Ok(())
    }
}

/// A validated family with parsed expressions.
#[derive(Clone, Debug)]
pub struct Family {
    pub spec: FamilySpec,
    breakpoints: Vec<AffineExpr>,
    values: Vec<AffineExpr>,
    constraints: Vec<AffineExpr>,
}

/// Why a sample did not yield a function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SampleError {
    NoRationalInRange(String),
    ConstraintViolated(String),
    Construction(String),
}

impl Family {
    pub fn new(spec: FamilySpec) -> Result<Self, CliError> {
        let bad = |msg: String| CliError::BadFamilySpec(msg);
        let mut names = std::collections::BTreeSet::new();
        for p in &spec.parameters {
            if !names.insert(p.name.clone()) {
                return Err(bad(format!("duplicate parameter {:?}", p.name)));
            }
            if p.min >= p.max {
                return Err(bad(format!("empty range for {:?}", p.name)));
            }
            if p.max_denominator == 0 || p.max_denominator > 1 << 32 {
                return Err(bad(format!("max_denominator for {:?} must be in 1..=2^32", p.name)));
            }
        }
        if spec.breakpoints.len() != spec.values.len() || spec.breakpoints.len() < 2 {
            return Err(bad("breakpoints and values need the same length, at least 2".into()));
        }
        let parse = |list: &[String]| -> Result<Vec<AffineExpr>, CliError> {
            list.iter()
                .map(|s| {
                    let e: AffineExpr = s.parse().map_err(|m| bad(format!("{s:?}: {m}")))?;
                    match e.coeffs.keys().find(|n| !names.contains(*n)) {
                        Some(n) => Err(bad(format!("{s:?}: unknown parameter {n:?}"))),
                        None => Ok(e),
                    }
                })
                .collect()
        };
        Ok(Family {
            breakpoints: parse(&spec.breakpoints)?,
            values: parse(&spec.values)?,
            constraints: parse(&spec.constraints)?,
            spec,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let spec: FamilySpec = serde_json::from_str(text).map_err(|e| CliError::BadFamilySpec(e.to_string()))?;
        Family::new(spec)
    }

    /// Draws every parameter from its open range with denominator at most
    /// `max_denominator`, in declaration order.
    pub fn sample_parameters(&self, rng: &mut Lcg64) -> Result<BTreeMap<String, Rational>, SampleError> {
        let mut out = BTreeMap::new();
        for p in &self.spec.parameters {
            out.insert(p.name.clone(), sample_open(p, rng)?);
        }
        Ok(out)
    }

    pub fn instantiate(&self, params: &BTreeMap<String, Rational>) -> Result<PwlPeriodic, SampleError> {
        let eval = |e: &AffineExpr| e.eval(params).expect("parameters validated");
        for (c, text) in self.constraints.iter().zip(&self.spec.constraints) {
            if eval(c).is_negative() {
                return Err(SampleError::ConstraintViolated(text.clone()));
            }
        }
        let points: Vec<Rational> = self.breakpoints.iter().map(eval).collect();
        let values: Vec<Rational> = self.values.iter().map(eval).collect();
        PwlPeriodic::from_breakpoints(&points, &values).map_err(|e| SampleError::Construction(e.to_string()))
    }
}

fn sample_open(p: &ParameterRange, rng: &mut Lcg64) -> Result<Rational, SampleError> {
    for _ in 0..SAMPLE_ATTEMPTS {
        let d = 1 + rng.below(p.max_denominator) as i64;
        let dd = Rational::from_integer(d);
        let lo = (&p.min * &dd).floor() + Rational::one();
        let hi = (&p.max * &dd).ceil() - Rational::one();
        if lo > hi {
            continue;
        }
        let span = (&hi - &lo + Rational::one()).numer().clone();
        let Ok(span) = u64::try_from(span) else {
            continue;
        };
        if span > 1 << 32 {
            continue;
        }
        let k = Rational::from_integer(rng.below(span) as i64);
        return Ok((lo + k) / dd);
    }
    Err(SampleError::NoRationalInRange(p.name.clone()))
}
