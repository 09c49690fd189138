//! Scalar functions with declared convexity classes, and the scalar-level
//! interpolation machinery (`K_f`, `r(α)`, `t̃`) plus spot checkers.
//!
//! Classes are declared, never inferred: the checkers in [`checks`] verify
//! them on sample points.

mod checks;
mod interval;

pub use checks::{
    check_logconvex_chain, check_superquadratic_characterization, check_superquadratic_definition,
    interpolation_constants, is_equality, kf_constant, r_alpha, tilde_t, DefinitionCheck,
    InterpolationConstants, LinkCheck, LogConvexChainCheck, SlackCheck, EQUALITY_REL_TOL,
};
pub use interval::Interval;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum FunctionClass {
    LogConvex,
    Convex,
    Superquadratic,
    NonNegative,
}

impl FunctionClass {
    const ALL: [FunctionClass; 4] = [
        FunctionClass::LogConvex,
        FunctionClass::Convex,
        FunctionClass::Superquadratic,
        FunctionClass::NonNegative,
    ];

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

impl fmt::Display for FunctionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FunctionClass::LogConvex => "log-convex",
            FunctionClass::Convex => "convex",
            FunctionClass::Superquadratic => "superquadratic",
            FunctionClass::NonNegative => "non-negative",
        };
        f.write_str(name)
    }
}

/// Small set of [`FunctionClass`] values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ClassSet(u8);

impl ClassSet {
    pub fn of(classes: &[FunctionClass]) -> Self {
        classes.iter().fold(Self::default(), |s, &c| s.with(c))
    }

    pub fn with(self, class: FunctionClass) -> Self {
        Self(self.0 | class.bit())
    }

    pub fn contains(self, class: FunctionClass) -> bool {
        self.0 & class.bit() != 0
    }

    pub fn iter(self) -> impl Iterator<Item = FunctionClass> {
        FunctionClass::ALL.into_iter().filter(move |c| self.contains(*c))
    }
}

impl Serialize for ClassSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter().map(|c| c.to_string()))
    }
}

#[derive(Clone)]
enum Kind {
    /// `exp(a·t)`
    Exp { a: f64 },
    /// `t^p`
    Pow { p: f64 },
    Const { c: f64 },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// A scalar function `f: J → ℝ` with declared classes.
#[derive(Clone)]
pub struct FunctionDescriptor {
    id: String,
    domain: Interval,
    classes: ClassSet,
    kind: Kind,
}

impl fmt::Debug for FunctionDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionDescriptor")
            .field("id", &self.id)
            .field("domain", &self.domain)
            .field("classes", &self.classes)
            .finish()
    }
}

impl FunctionDescriptor {
    pub fn exp(a: f64) -> Self {
        let id = if a == 1.0 { "exp".to_string() } else { format!("exp:a={a}") };
        Self {
            id,
            domain: Interval::real_line(),
            classes: ClassSet::of(&[
                FunctionClass::LogConvex,
                FunctionClass::Convex,
                FunctionClass::NonNegative,
            ]),
            kind: Kind::Exp { a },
        }
    }

    /// `t^p`. Domain `(0, ∞)` for `p ≤ 0`, `[0, ∞)` otherwise.
    pub fn pow(p: f64) -> Self {
        use FunctionClass::*;
        let (domain, classes) = if p <= 0.0 {
            (
                Interval::positive_open(),
                ClassSet::of(&[LogConvex, Convex, NonNegative]),
            )
        } else if p >= 2.0 {
            (
                Interval::non_negative(),
                ClassSet::of(&[Superquadratic, Convex, NonNegative]),
            )
        } else if p >= 1.0 {
            (Interval::non_negative(), ClassSet::of(&[Convex, NonNegative]))
        } else {
            (Interval::non_negative(), ClassSet::of(&[NonNegative]))
        };
        let id = if p == -1.0 { "recip".to_string() } else { format!("pow:p={p}") };
        Self {
            id,
            domain,
            classes,
            kind: Kind::Pow { p },
        }
    }

    /// The constant `c`. Non-positive constants are superquadratic on `[0, ∞)`;
    /// positive ones are log-convex on the real line.
    pub fn constant(c: f64) -> Self {
        use FunctionClass::*;
        let (domain, classes) = if c > 0.0 {
            (Interval::real_line(), ClassSet::of(&[LogConvex, Convex, NonNegative]))
        } else if c == 0.0 {
            (
                Interval::non_negative(),
                ClassSet::of(&[Convex, Superquadratic, NonNegative]),
            )
        } else {
            (Interval::non_negative(), ClassSet::of(&[Convex, Superquadratic]))
        };
        Self {
            id: format!("const:c={c}"),
            domain,
            classes,
            kind: Kind::Const { c },
        }
    }

    /// A user-supplied function. The classes are taken on trust.
    pub fn custom(
        id: impl Into<String>,
        domain: Interval,
        classes: ClassSet,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            domain,
            classes,
            kind: Kind::Custom(Arc::new(eval)),
        }
    }

    /// Parses a CLI function spec: `exp`, `exp:a=<real>`, `pow:p=<real>`,
    /// `recip`, `const:c=<real>`.
    pub fn parse(spec: &str) -> Result<Self> {
        let err = |reason: &str| Error::Parse {
            input: spec.to_string(),
            reason: reason.to_string(),
        };
        let (name, params) = match spec.split_once(':') {
            Some((name, rest)) => (name, parse_params(rest).map_err(|r| err(&r))?),
            None => (spec, BTreeMap::new()),
        };
        let take = |key: &str| -> Result<f64> {
            if params.len() != 1 || !params.contains_key(key) {
                return Err(err(&format!("expected exactly one parameter `{key}`")));
            }
            Ok(params[key])
        };
        match name {
            "exp" if params.is_empty() && !spec.contains(':') => Ok(Self::exp(1.0)),
            "exp" => Ok(Self::exp(take("a")?)),
            "recip" if !spec.contains(':') => Ok(Self::pow(-1.0)),
            "pow" => Ok(Self::pow(take("p")?)),
            "const" => Ok(Self::constant(take("c")?)),
            "recip" => Err(err("`recip` takes no parameters")),
            _ => Err(err("unknown function id")),
        }
    }

    /// Restricts the domain to `domain`, which must lie inside the current one.
    pub fn with_domain(mut self, domain: Interval) -> Result<Self> {
        if !domain.is_subset_of(&self.domain) {
            return Err(Error::InvalidArgument(format!(
                "{domain} is not contained in the domain {} of `{}`",
                self.domain, self.id
            )));
        }
        self.domain = domain;
        Ok(self)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn domain(&self) -> &Interval {
        &self.domain
    }

    pub fn classes(&self) -> ClassSet {
        self.classes
    }

    pub fn has_class(&self, class: FunctionClass) -> bool {
        self.classes.contains(class)
    }

    /// Named real parameters such as `p`; empty for custom functions.
    pub fn params(&self) -> BTreeMap<&'static str, f64> {
        match self.kind {
            Kind::Exp { a } => BTreeMap::from([("a", a)]),
            Kind::Pow { p } => BTreeMap::from([("p", p)]),
            Kind::Const { c } => BTreeMap::from([("c", c)]),
            Kind::Custom(_) => BTreeMap::new(),
        }
    }

    /// Exponent when this is a power function.
    pub fn power_exponent(&self) -> Option<f64> {
        match self.kind {
            Kind::Pow { p } => Some(p),
            _ => None,
        }
    }

    /// Evaluates without a domain check.
    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Exp { a } => (a * t).exp(),
            Kind::Pow { p } => power(t, *p),
            Kind::Const { c } => *c,
            Kind::Custom(f) => f(t),
        }
    }

    pub fn eval_checked(&self, t: f64) -> Result<f64> {
        if !self.domain.contains(t) {
            return Err(Error::DomainViolation {
                function: self.id.clone(),
                value: t,
                domain: self.domain.to_string(),
            });
        }
        Ok(self.eval(t))
    }
}

fn power(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p.fract() == 0.0 && p.abs() <= 64.0 {
        t.powi(p as i32)
    } else if t == 0.0 && p > 0.0 {
        0.0
    } else {
        (p * t.ln()).exp()
    }
}

fn parse_params(text: &str) -> std::result::Result<BTreeMap<String, f64>, String> {
    let mut out = BTreeMap::new();
    for pair in text.split(',') {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("parameter `{pair}` is not key=value"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| format!("`{value}` is not a real number"))?;
        if !value.is_finite() {
            return Err(format!("parameter `{key}` must be finite"));
        }
        if out.insert(key.trim().to_string(), value).is_some() {
            return Err(format!("parameter `{key}` given twice"));
        }
    }
    Ok(out)
}

/// The log-convex functions exercised by the test suites.
pub fn builtin_log_convex() -> Vec<FunctionDescriptor> {
    vec![
        FunctionDescriptor::exp(1.0),
        FunctionDescriptor::exp(2.0),
        FunctionDescriptor::pow(-1.0),
        FunctionDescriptor::pow(-2.0),
    ]
}

/// The superquadratic functions exercised by the test suites.
pub fn builtin_superquadratic() -> Vec<FunctionDescriptor> {
    vec![
        FunctionDescriptor::pow(2.0),
        FunctionDescriptor::pow(3.0),
        FunctionDescriptor::pow(2.5),
    ]
}
