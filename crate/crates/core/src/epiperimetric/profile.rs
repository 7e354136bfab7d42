use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

type Eval = Arc<dyn Fn(f64) -> [f64; 3] + Send + Sync>;

/// A time profile f on [0, ∞) with its first two derivatives.
///
/// `settle` is a time beyond which f is constant (equal to `tail_value`);
/// profiles that only decay use `f64::INFINITY`.
#[derive(Clone)]
pub struct DecayProfile {
    pub name: String,
    eval: Eval,
    pub settle: f64,
    pub tail_value: f64,
    pub breakpoints: Vec<f64>,
}

impl fmt::Debug for DecayProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DecayProfile")
            .field("name", &self.name)
            .field("settle", &self.settle)
            .field("tail_value", &self.tail_value)
            .finish()
    }
}

/// C² step: 1 on (−∞, −1], 0 on [0, ∞), quintic in between.
pub fn smoothstep(x: f64) -> [f64; 3] {
    if x <= -1.0 {
        return [1.0, 0.0, 0.0];
    }
    if x >= 0.0 {
        return [0.0; 3];
    }
    let y = x + 1.0;
    let (y2, y3) = (y * y, y * y * y);
    [
        1.0 - (10.0 * y3 - 15.0 * y2 * y2 + 6.0 * y3 * y2),
        -(30.0 * y2 - 60.0 * y3 + 30.0 * y2 * y2),
        -(60.0 * y - 180.0 * y2 + 120.0 * y3),
    ]
}

fn mul(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[0] * b[0],
        a[1] * b[0] + a[0] * b[1],
        a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
    ]
}

impl DecayProfile {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> [f64; 3] + Send + Sync + 'static,
        settle: f64,
        tail_value: f64,
        breakpoints: Vec<f64>,
    ) -> Self {
        DecayProfile {
            name: name.into(),
            eval: Arc::new(eval),
            settle,
            tail_value,
            breakpoints,
        }
    }

    pub fn eval(&self, t: f64) -> [f64; 3] {
        if t >= self.settle {
            return [self.tail_value, 0.0, 0.0];
        }
        (self.eval)(t)
    }

    pub fn value(&self, t: f64) -> f64 {
        self.eval(t)[0]
    }

    pub fn f0(&self) -> f64 {
        self.value(0.0)
    }

    pub fn fp0(&self) -> f64 {
        self.eval(0.0)[1]
    }

    /// True when f vanishes identically from `support_end` on.
    pub fn compact_support(&self) -> bool {
        self.settle.is_finite() && self.tail_value == 0.0
    }

    pub fn support_end(&self) -> f64 {
        self.settle
    }

    pub fn constant(c: f64) -> Self {
        DecayProfile::new(format!("const({c})"), move |_| [c, 0.0, 0.0], 0.0, c, vec![])
    }

    /// Pointwise product; settles once both factors have.
    pub fn product(&self, other: &DecayProfile) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let mut bp = self.breakpoints.clone();
        bp.extend_from_slice(&other.breakpoints);
        DecayProfile::new(
            format!("{}*{}", self.name, other.name),
            move |t| mul(a.eval(t), b.eval(t)),
            self.settle.max(other.settle),
            self.tail_value * other.tail_value,
            bp,
        )
    }

    /// f(t − s) on t ≥ s, held at f(0) on [0, s].
    pub fn delayed(&self, s: f64) -> Self {
        let a = self.clone();
        let mut bp: Vec<f64> = self.breakpoints.iter().map(|b| b + s).collect();
        bp.push(s);
        let f0 = self.value(0.0);
        DecayProfile::new(
            format!("{}(t-{s})", self.name),
            move |t| if t <= s { [f0, 0.0, 0.0] } else { a.eval(t - s) },
            self.settle + s,
            self.tail_value,
            bp,
        )
    }

    /// Profile equal to `self` on [0, switch) and to `then` (restarted at
    /// 0) afterwards. C² only when the jets agree at the switch.
    pub fn followed_by(&self, switch: f64, then: &DecayProfile) -> Self {
        let (a, b) = (self.clone(), then.clone());
        let mut bp = self.breakpoints.clone();
        bp.push(switch);
        bp.extend(then.breakpoints.iter().map(|x| x + switch));
        DecayProfile::new(
            format!("{}|{}", self.name, then.name),
            move |t| if t < switch { a.eval(t) } else { b.eval(t - switch) },
            switch + then.settle,
            then.tail_value,
            bp,
        )
    }
}

/// sup_t (|χ_ε'| + |χ_ε''|)/(9ε) is at most this: sup te^{−t} + sup|1 − t|e^{−t}.
pub const CHI_EPS_C2: f64 = 1.0 + 1.0 / std::f64::consts::E;

/// χ_ε(t) = 1 − 9ε(1 − (1 + t)e^{−t}).
pub fn chi_eps(eps: f64) -> Result<DecayProfile> {
    if !(eps > 0.0 && eps < 1.0 / 9.0) {
        return Err(Error::Domain(format!("ε = {eps} must lie in (0, 1/9)")));
    }
    Ok(DecayProfile::new(
        format!("chi_eps({eps})"),
        move |t| {
            let e = (-t).exp();
            [
                1.0 - 9.0 * eps * (1.0 - (1.0 + t) * e),
                -9.0 * eps * t * e,
                -9.0 * eps * (1.0 - t) * e,
            ]
        },
        f64::INFINITY,
        1.0 - 9.0 * eps,
        vec![],
    ))
}

/// χ(t − T)(1 + εt)e^{−εt}: the positive-eigenvalue profile.
pub fn positive_profile(eps: f64, t_cut: f64) -> DecayProfile {
    let base = move |t: f64| {
        let e = (-eps * t).exp();
        [
            (1.0 + eps * t) * e,
            -eps * eps * t * e,
            eps * eps * (eps * t - 1.0) * e,
        ]
    };
    DecayProfile::new(
        format!("pos(eps={eps},T={t_cut})"),
        move |t| mul(base(t), smoothstep(t - t_cut)),
        t_cut,
        0.0,
        vec![t_cut - 1.0, t_cut],
    )
}

/// χ(t − T)(εt + e^{−εt}): the negative-eigenvalue profile.
pub fn negative_profile(eps: f64, t_cut: f64) -> DecayProfile {
    let base = move |t: f64| {
        let e = (-eps * t).exp();
        [eps * t + e, eps - eps * e, eps * eps * e]
    };
    DecayProfile::new(
        format!("neg(eps={eps},T={t_cut})"),
        move |t| mul(base(t), smoothstep(t - t_cut)),
        t_cut,
        0.0,
        vec![t_cut - 1.0, t_cut],
    )
}

/// t e^{−μ^{1/3} t}.
pub fn removal_profile(mu: f64) -> DecayProfile {
    let k = mu.cbrt();
    DecayProfile::new(
        format!("removal(mu={mu:.4})"),
        move |t| {
            let e = (-k * t).exp();
            [t * e, (1.0 - k * t) * e, k * (k * t - 2.0) * e]
        },
        f64::INFINITY,
        0.0,
        vec![],
    )
}
