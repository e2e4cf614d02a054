//! Common report type for hypothesis tests.

use alloc::string::String;
use alloc::vec::Vec;

/// Conventional significance levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    One,
    Five,
    Ten,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::One, Level::Five, Level::Ten];

    pub fn alpha(self) -> f64 {
        match self {
            Level::One => 0.01,
            Level::Five => 0.05,
            Level::Ten => 0.10,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::One => "1%",
            Level::Five => "5%",
            Level::Ten => "10%",
        }
    }
}

/// Side of the rejection region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    Lower,
    Upper,
}

/// Coarse p-value classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PBracket {
    Below1,
    Below5,
    Below10,
    AtLeast10,
}

impl PBracket {
    pub fn from_p(p: f64) -> Self {
        if p < 0.01 {
            PBracket::Below1
        } else if p < 0.05 {
            PBracket::Below5
        } else if p < 0.10 {
            PBracket::Below10
        } else {
            PBracket::AtLeast10
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PBracket::Below1 => "<1%",
            PBracket::Below5 => "<5%",
            PBracket::Below10 => "<10%",
            PBracket::AtLeast10 => ">=10%",
        }
    }

    /// `***` at 1%, `**` at 5%, `*` at 10%.
    pub fn stars(self) -> &'static str {
        match self {
            PBracket::Below1 => "***",
            PBracket::Below5 => "**",
            PBracket::Below10 => "*",
            PBracket::AtLeast10 => "",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PValue {
    Exact(f64),
    Bracket(PBracket),
}

/// Deterministic terms and bandwidth/lag settings a test was run with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TestSpec {
    pub intercept: bool,
    pub trend: bool,
    pub lags: Option<usize>,
    pub bandwidth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestReport {
    pub test_name: String,
    pub statistic: f64,
    pub tail: Tail,
    /// Ordered 1%, 5%, 10%.
    pub critical_values: Vec<(Level, f64)>,
    pub p_value: PValue,
    /// Linear interpolation of the p-value between tabulated critical values,
    /// when the statistic falls inside the table.
    pub p_interpolated: Option<f64>,
    pub spec: TestSpec,
    pub n: usize,
    /// Numerator and denominator degrees of freedom for F tests.
    pub df: Option<(f64, f64)>,
    /// Set when the statistic was defined by convention (zero variance, exact fit).
    pub degenerate: bool,
}

impl TestReport {
    pub fn critical_value(&self, level: Level) -> Option<f64> {
        self.critical_values.iter().find(|(l, _)| *l == level).map(|(_, v)| *v)
    }

    fn beyond(&self, cv: f64) -> bool {
        match self.tail {
            Tail::Lower => self.statistic < cv,
            Tail::Upper => self.statistic > cv,
        }
    }

    pub fn bracket(&self) -> PBracket {
        match self.p_value {
            PValue::Exact(p) => PBracket::from_p(p),
            PValue::Bracket(b) => b,
        }
    }

    /// Whether the null is rejected at `level`.
    pub fn rejects(&self, level: Level) -> bool {
        match self.p_value {
            PValue::Exact(p) => p < level.alpha(),
            PValue::Bracket(_) => self.critical_value(level).is_some_and(|cv| self.beyond(cv)),
        }
    }

    pub fn stars(&self) -> &'static str {
        self.bracket().stars()
    }

    pub fn exact_p(&self) -> Option<f64> {
        match self.p_value {
            PValue::Exact(p) => Some(p),
            PValue::Bracket(_) => None,
        }
    }
}

/// Brackets a statistic against ordered (1%, 5%, 10%) critical values.
pub(crate) fn bracket_from_critical(statistic: f64, tail: Tail, cvs: &[(Level, f64)]) -> PBracket {
    let beyond = |cv: f64| match tail {
        Tail::Lower => statistic < cv,
        Tail::Upper => statistic > cv,
    };
    for (level, cv) in cvs {
        if beyond(*cv) {
            return match level {
                Level::One => PBracket::Below1,
                Level::Five => PBracket::Below5,
                Level::Ten => PBracket::Below10,
            };
        }
    }
    PBracket::AtLeast10
}

/// Linear interpolation of the p-value between adjacent critical values.
pub(crate) fn interpolate_p(statistic: f64, cvs: &[(Level, f64)]) -> Option<f64> {
    cvs.windows(2).find_map(|w| {
        let ((l0, c0), (l1, c1)) = (w[0], w[1]);
        let (lo, hi) = if c0 < c1 { (c0, c1) } else { (c1, c0) };
        (lo..=hi).contains(&statistic).then(|| {
            let t = (statistic - c0) / (c1 - c0);
            l0.alpha() + t * (l1.alpha() - l0.alpha())
        })
    })
}
