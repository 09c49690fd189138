use crate::error::{Error, Result};
use crate::functions::{kf_constant, tilde_t, ClassSet, FunctionDescriptor, Interval};
use crate::hermitian::HermitianMatrix;

/// Scalar building blocks for one `(f, m, M)`: the interpolating function
/// `g` and the chord `L`, plus the superquadratic corrections.
///
/// Each is compiled into a single [`FunctionDescriptor`] so that a chain term
/// depending on one operator argument is one functional-calculus call.
#[derive(Debug, Clone)]
pub struct Interpolant {
    f: FunctionDescriptor,
    m: f64,
    upper: f64,
    fm: f64,
    f_upper: f64,
}

impl Interpolant {
    pub fn new(f: &FunctionDescriptor, m: f64, upper: f64) -> Result<Self> {
        if !(m < upper) {
            return Err(Error::DegenerateInterval { m, upper });
        }
        Ok(Self {
            f: f.clone(),
            m,
            upper,
            fm: f.eval_checked(m)?,
            f_upper: f.eval_checked(upper)?,
        })
    }

    pub fn f_m(&self) -> f64 {
        self.fm
    }

    pub fn f_upper(&self) -> f64 {
        self.f_upper
    }

    fn width(&self) -> f64 {
        self.upper - self.m
    }

    /// `g(t) = K^{t̃} f(m)^{(M−t)/(M−m)} f(M)^{(t−m)/(M−m)}` on the domain of `f`.
    pub fn g(&self) -> Result<FunctionDescriptor> {
        let kf = kf_constant(&self.f, self.m, self.upper)?;
        let (m, upper, fm, fu) = (self.m, self.upper, self.fm, self.f_upper);
        Ok(FunctionDescriptor::custom(
            format!("g[{}]", self.f.id()),
            *self.f.domain(),
            ClassSet::default(),
            move |t| interpolate(kf, fm, fu, m, upper, t),
        ))
    }

    /// `g` for `f(t) = t^p` in closed form:
    /// `((m+M)/(2√(mM)))^{2p t̃} m^{p(M−t)/(M−m)} M^{p(t−m)/(M−m)}`.
    pub fn g_power(&self, p: f64) -> FunctionDescriptor {
        let (m, upper) = (self.m, self.upper);
        let ratio = (m + upper) / (2.0 * (m * upper).sqrt());
        FunctionDescriptor::custom(
            format!("g[pow:p={p}]"),
            *self.f.domain(),
            ClassSet::default(),
            move |t| {
                let w = upper - m;
                let tt = 0.5 - (t - 0.5 * (m + upper)).abs() / w;
                ratio.powf(2.0 * p * tt) * m.powf(p * (upper - t) / w) * upper.powf(p * (t - m) / w)
            },
        )
    }

    /// Scalar value of `g`.
    pub fn g_value(&self, t: f64) -> Result<f64> {
        let kf = kf_constant(&self.f, self.m, self.upper)?;
        tilde_t(t, self.m, self.upper)?;
        Ok(interpolate(kf, self.fm, self.f_upper, self.m, self.upper, t))
    }

    /// `k·L(S/k)`: the chord summed over `k` operators with sum `S`, i.e.
    /// `(kM − S)/(M−m) f(m) + (S − km)/(M−m) f(M)`.
    pub fn linear(&self, s: &HermitianMatrix, k: f64) -> HermitianMatrix {
        let w = self.width();
        s.affine(
            (self.f_upper - self.fm) / w,
            k * (self.upper * self.fm - self.m * self.f_upper) / w,
        )
    }

    /// `(M−t)/(M−m) f(t−m) + (t−m)/(M−m) f(M−t)` on `[m, M]`.
    pub fn inner_correction(&self) -> Result<FunctionDescriptor> {
        let dom = self.f.domain();
        let domain = Interval::closed(self.m, self.upper)
            .intersect(&dom.shifted(self.m))
            .and_then(|d| d.intersect(&dom.reflected(self.upper)))
            .ok_or_else(|| self.empty("inner correction"))?;
        let (f, m, upper) = (self.f.clone(), self.m, self.upper);
        Ok(FunctionDescriptor::custom(
            format!("icorr[{}]", self.f.id()),
            domain,
            ClassSet::default(),
            move |t| {
                let w = upper - m;
                (upper - t) / w * f.eval(t - m) + (t - m) / w * f.eval(upper - t)
            },
        ))
    }

    /// `f(m−t) + (m−t)/(M−m) f(M−m)` for `t ≤ m`.
    pub fn lower_correction(&self) -> Result<FunctionDescriptor> {
        let domain = Interval::new(f64::NEG_INFINITY, self.m, false, true)
            .intersect(&self.f.domain().reflected(self.m))
            .ok_or_else(|| self.empty("lower correction"))?;
        let fw = self.f.eval_checked(self.width())?;
        let (f, m, w) = (self.f.clone(), self.m, self.width());
        Ok(FunctionDescriptor::custom(
            format!("lcorr[{}]", self.f.id()),
            domain,
            ClassSet::default(),
            move |t| f.eval(m - t) + (m - t) / w * fw,
        ))
    }

    /// `f(t−M) + (t−M)/(M−m) f(M−m)` for `t ≥ M`.
    pub fn upper_correction(&self) -> Result<FunctionDescriptor> {
        let domain = Interval::new(self.upper, f64::INFINITY, true, false)
            .intersect(&self.f.domain().shifted(self.upper))
            .ok_or_else(|| self.empty("upper correction"))?;
        let fw = self.f.eval_checked(self.width())?;
        let (f, upper, w) = (self.f.clone(), self.upper, self.width());
        Ok(FunctionDescriptor::custom(
            format!("ucorr[{}]", self.f.id()),
            domain,
            ClassSet::default(),
            move |t| f.eval(t - upper) + (t - upper) / w * fw,
        ))
    }

    fn empty(&self, what: &str) -> Error {
        Error::InvalidArgument(format!(
            "{what} of `{}` has an empty domain on [{}, {}]",
            self.f.id(),
            self.m,
            self.upper
        ))
    }
}

fn interpolate(kf: f64, fm: f64, fu: f64, m: f64, upper: f64, t: f64) -> f64 {
    let w = upper - m;
    let tt = 0.5 - (t - 0.5 * (m + upper)).abs() / w;
    kf.powf(tt) * fm.powf((upper - t) / w) * fu.powf((t - m) / w)
}
