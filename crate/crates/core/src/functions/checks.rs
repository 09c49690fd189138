use serde::Serialize;

use super::{FunctionClass, FunctionDescriptor};
use crate::error::{Error, Result};

/// Two values are "equal" when `|a − b| ≤ 1e-10 · max(1, |a|, |b|)`.
pub const EQUALITY_REL_TOL: f64 = 1e-10;

pub fn is_equality(a: f64, b: f64) -> bool {
    (a - b).abs() <= EQUALITY_REL_TOL * 1f64.max(a.abs()).max(b.abs())
}

/// `K_f(x, y) = f((x+y)/2)² / (f(x) f(y))`.
pub fn kf_constant(f: &FunctionDescriptor, x: f64, y: f64) -> Result<f64> {
    let fx = f.eval_checked(x)?;
    let fy = f.eval_checked(y)?;
    let mid = f.eval_checked(0.5 * (x + y))?;
    let denom = fx * fy;
    if denom == 0.0 {
        return Err(Error::DivisionByZero(format!("K_f({x}, {y}) for `{}`", f.id())));
    }
    Ok(mid * mid / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterpolationConstants {
    pub kf: f64,
    #[serde(rename = "m")]
    pub lower: f64,
    #[serde(rename = "M")]
    pub upper: f64,
    /// `false` when `f` is not declared log-convex, in which case `kf ≤ 1`
    /// is not guaranteed.
    pub log_convex: bool,
}

pub fn interpolation_constants(f: &FunctionDescriptor, lower: f64, upper: f64) -> Result<InterpolationConstants> {
    Ok(InterpolationConstants {
        kf: kf_constant(f, lower, upper)?,
        lower,
        upper,
        log_convex: f.has_class(FunctionClass::LogConvex),
    })
}

/// `r(α) = min(α, 1 − α)`.
pub fn r_alpha(alpha: f64) -> f64 {
    alpha.min(1.0 - alpha)
}

/// `t̃ = 1/2 − |t − (m+M)/2| / (M − m)`.
pub fn tilde_t(t: f64, lower: f64, upper: f64) -> Result<f64> {
    if !(upper > lower) {
        return Err(Error::DegenerateInterval { m: lower, upper });
    }
    Ok(0.5 - (t - 0.5 * (lower + upper)).abs() / (upper - lower))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkCheck {
    /// Positive when the link holds strictly, in the link's orientation.
    pub slack: f64,
    pub holds: bool,
    pub equality: bool,
}

impl LinkCheck {
    fn new(smaller: f64, larger: f64, tol: f64) -> Self {
        let slack = larger - smaller;
        Self {
            slack,
            holds: slack >= -tol,
            equality: is_equality(smaller, larger),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogConvexChainCheck {
    /// `f(αx+(1−α)y)`, `K^{r(α)} f(x)^α f(y)^{1−α}`, `αf(x)+(1−α)f(y)`.
    pub values: [f64; 3],
    pub links: [LinkCheck; 2],
    /// `α ∉ [0, 1]`: the chain is checked in descending order.
    pub reversed: bool,
}

impl LogConvexChainCheck {
    pub fn holds(&self) -> bool {
        self.links.iter().all(|l| l.holds)
    }
}

/// Checks the interpolated log-convex chain at one `(x, y, α)`.
pub fn check_logconvex_chain(
    f: &FunctionDescriptor,
    x: f64,
    y: f64,
    alpha: f64,
    tol: f64,
) -> Result<LogConvexChainCheck> {
    let point = alpha * x + (1.0 - alpha) * y;
    let fx = f.eval_checked(x)?;
    let fy = f.eval_checked(y)?;
    let fp = f.eval_checked(point)?;
    let kf = kf_constant(f, x, y)?;
    let geometric = kf.powf(r_alpha(alpha)) * fx.powf(alpha) * fy.powf(1.0 - alpha);
    let arithmetic = alpha * fx + (1.0 - alpha) * fy;
    let values = [fp, geometric, arithmetic];
    let reversed = !(0.0..=1.0).contains(&alpha);
    let links = if reversed {
        [
            LinkCheck::new(geometric, fp, tol),
            LinkCheck::new(arithmetic, geometric, tol),
        ]
    } else {
        [
            LinkCheck::new(fp, geometric, tol),
            LinkCheck::new(geometric, arithmetic, tol),
        ]
    };
    Ok(LogConvexChainCheck {
        values,
        links,
        reversed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlackCheck {
    pub slack: f64,
    pub holds: bool,
}

/// Slack of the superquadratic Jensen characterization at `(x, y, α)`:
/// `αf(x) + (1−α)f(y) − αf((1−α)|x−y|) − (1−α)f(α|x−y|) − f(αx+(1−α)y)`.
pub fn check_superquadratic_characterization(
    f: &FunctionDescriptor,
    x: f64,
    y: f64,
    alpha: f64,
    tol: f64,
) -> Result<SlackCheck> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha must lie in [0, 1], got {alpha}")));
    }
    if x < 0.0 || y < 0.0 {
        return Err(Error::DomainViolation {
            function: f.id().to_string(),
            value: x.min(y),
            domain: "[0, inf)".into(),
        });
    }
    let gap = (x - y).abs();
    let rhs = alpha * f.eval_checked(x)? + (1.0 - alpha) * f.eval_checked(y)?
        - alpha * f.eval_checked((1.0 - alpha) * gap)?
        - (1.0 - alpha) * f.eval_checked(alpha * gap)?;
    let lhs = f.eval_checked(alpha * x + (1.0 - alpha) * y)?;
    let slack = rhs - lhs;
    Ok(SlackCheck {
        slack,
        holds: slack >= -tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefinitionCheck {
    /// The derivative-based candidate for `c_s`.
    pub c_s: f64,
    /// `min_t f(t) − f(s) − f(|t−s|) − c_s (t − s)` over the grid.
    pub worst_slack: f64,
    pub worst_t: f64,
    /// A failure only says the derivative candidate does not work.
    pub holds: bool,
}

/// Checks the superquadratic definition at `s` over `t_grid`, using the
/// finite-difference slope of `g(t) = f(t) − f(|t − s|)` at `t = s` as `c_s`.
pub fn check_superquadratic_definition(
    f: &FunctionDescriptor,
    s: f64,
    t_grid: &[f64],
    tol: f64,
) -> Result<DefinitionCheck> {
    if s < 0.0 {
        return Err(Error::DomainViolation {
            function: f.id().to_string(),
            value: s,
            domain: "[0, inf)".into(),
        });
    }
    if t_grid.is_empty() {
        return Err(Error::InvalidArgument("empty t grid".into()));
    }
    let g = |t: f64| -> Result<f64> { Ok(f.eval_checked(t)? - f.eval_checked((t - s).abs())?) };
    let h = 1e-6 * s.max(1.0);
    // Central difference where it stays inside [0, ∞), forward otherwise.
    let c_s = if s >= h {
        (g(s + h)? - g(s - h)?) / (2.0 * h)
    } else {
        (g(s + h)? - g(s)?) / h
    };
    let fs = f.eval_checked(s)?;
    let mut worst_slack = f64::INFINITY;
    let mut worst_t = t_grid[0];
    for &t in t_grid {
        if t < 0.0 {
            return Err(Error::DomainViolation {
                function: f.id().to_string(),
                value: t,
                domain: "[0, inf)".into(),
            });
        }
        let slack = f.eval_checked(t)? - fs - f.eval_checked((t - s).abs())? - c_s * (t - s);
        if slack < worst_slack {
            worst_slack = slack;
            worst_t = t;
        }
    }
    Ok(DefinitionCheck {
        c_s,
        worst_slack,
        worst_t,
        holds: worst_slack >= -tol,
    })
}
