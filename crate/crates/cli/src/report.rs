//! JSON shapes of the reports. Big integers are written as decimal strings.

use serde::Serialize;
use subshift::analysis::{Verdict, VerdictPath};
use subshift::{IntPolynomial, IntegerMatrix, Morphism, Periodicity};

#[derive(Debug, Serialize)]
pub struct RuleReport {
    pub letter: String,
    pub image: Vec<String>,
}

pub fn rules(m: &Morphism) -> Vec<RuleReport> {
    m.domain()
        .letters()
        .map(|l| RuleReport {
            letter: m.domain().token(l).to_string(),
            image: m.image(l).letters().iter().map(|&c| m.codomain().token(c).to_string()).collect(),
        })
        .collect()
}

pub fn matrix(m: &IntegerMatrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(ToString::to_string).collect()).collect()
}

pub fn strings<T: ToString>(items: &[T]) -> Vec<String> {
    items.iter().map(ToString::to_string).collect()
}

#[derive(Debug, Serialize)]
pub struct PolynomialReport {
    /// Coefficients from the constant term up.
    pub coefficients: Vec<String>,
    pub display: String,
}

impl From<&IntPolynomial> for PolynomialReport {
    fn from(p: &IntPolynomial) -> Self {
        Self { coefficients: strings(p.coeffs()), display: p.to_string() }
    }
}

#[derive(Debug, Serialize)]
pub struct PeriodicityReport {
    /// `periodic`, `aperiodic_evidence` or `not_probed`.
    pub status: &'static str,
    pub period: Option<String>,
    pub depth: Option<usize>,
    pub prefix_len: Option<usize>,
    /// True only for a proven period.
    pub certified: bool,
    pub summary: String,
}

impl PeriodicityReport {
    pub fn not_probed() -> Self {
        Self {
            status: "not_probed",
            period: None,
            depth: None,
            prefix_len: None,
            certified: false,
            summary: "periodicity not probed for this input".into(),
        }
    }
}

impl From<&Periodicity> for PeriodicityReport {
    fn from(p: &Periodicity) -> Self {
        match p {
            Periodicity::Periodic { period } => Self {
                status: "periodic",
                period: Some(period.to_string()),
                depth: None,
                prefix_len: None,
                certified: true,
                summary: p.to_string(),
            },
            Periodicity::AperiodicEvidence { depth, prefix_len } => Self {
                status: "aperiodic_evidence",
                period: None,
                depth: Some(*depth),
                prefix_len: Some(*prefix_len),
                certified: false,
                summary: p.to_string(),
            },
        }
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PathReport {
    ConstantLength { l: usize },
    Proper,
    Properized { tau_power: usize, zeta_power: usize, zeta_size: usize },
}

impl From<&VerdictPath> for PathReport {
    fn from(p: &VerdictPath) -> Self {
        match *p {
            VerdictPath::ConstantLength { l } => PathReport::ConstantLength { l },
            VerdictPath::Proper => PathReport::Proper,
            VerdictPath::Properized { tau_power, zeta_power, zeta_size } => {
                PathReport::Properized { tau_power, zeta_power, zeta_size }
            }
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ConstantLengthReport {
    pub l: usize,
    pub h: String,
    pub occurrence_gcd: String,
    pub stabilized_at: usize,
    /// `(h, l, l, …)` as its first two entries.
    pub odometer_base: [String; 2],
}

#[derive(Debug, Serialize)]
pub struct VerdictReport {
    pub input: String,
    pub alphabet: Vec<String>,
    pub substitution: Vec<RuleReport>,
    pub seed: String,
    pub seed_power: usize,
    pub periodicity: PeriodicityReport,
    pub valid: bool,
    pub path: PathReport,
    pub matrix: Vec<Vec<String>>,
    pub r: usize,
    pub q: PolynomialReport,
    pub g: String,
    #[serde(rename = "F_finite")]
    pub f_finite: bool,
    #[serde(rename = "Fstar_finite")]
    pub fstar_finite: bool,
    pub constant_length: Option<ConstantLengthReport>,
    pub odometer_primes: Vec<String>,
    /// Heuristic superset of the spectrum primes; null when det M = 0.
    pub candidate_primes: Option<Vec<String>>,
    pub zeta: Option<Vec<RuleReport>>,
    pub notes: Vec<String>,
}

impl VerdictReport {
    pub fn new(input: &str, v: &Verdict) -> Self {
        let sigma = &v.substitution;
        Self {
            input: input.to_string(),
            alphabet: sigma.alphabet().tokens().to_vec(),
            substitution: rules(sigma.morphism()),
            seed: sigma.alphabet().token(sigma.seed()).to_string(),
            seed_power: v.seed_power,
            periodicity: (&v.periodicity).into(),
            valid: v.is_valid(),
            path: (&v.path).into(),
            matrix: matrix(&v.matrix),
            r: v.r,
            q: (&v.q).into(),
            g: v.g.to_string(),
            f_finite: v.f_finite,
            fstar_finite: v.fstar_finite,
            constant_length: v.constant_length.as_ref().map(|cl| ConstantLengthReport {
                l: cl.l,
                h: cl.height.h.to_string(),
                occurrence_gcd: cl.height.occurrence_gcd.to_string(),
                stabilized_at: cl.height.stabilized_at,
                odometer_base: [cl.base.h.to_string(), cl.base.l.to_string()],
            }),
            odometer_primes: strings(&v.odometer_primes),
            candidate_primes: v.candidate_primes.as_deref().map(strings),
            zeta: v
                .properization
                .as_ref()
                .filter(|p| !p.pass_through)
                .map(|p| rules(p.zeta.morphism())),
            notes: v.notes.clone(),
        }
    }

    pub fn text(&self) -> String {
        let mut out = String::new();
        let mut line = |s: String| {
            out.push_str(&s);
            out.push('\n');
        };
        line(format!("input: {}", self.input));
        let subst: Vec<String> =
            self.substitution.iter().map(|r| format!("{} -> {}", r.letter, r.image.join(" "))).collect();
        line(format!("substitution: {}", subst.join("; ")));
        if self.seed_power > 1 {
            line(format!("seed power: {}", self.seed_power));
        }
        line(format!("periodicity: {}", self.periodicity.summary));
        let path = match &self.path {
            PathReport::ConstantLength { l } => format!("constant length {l}"),
            PathReport::Proper => "proper".into(),
            PathReport::Properized { tau_power, zeta_power, zeta_size } => format!(
                "properized (τ^{tau_power}, ζ power {zeta_power}, {zeta_size} letters)"
            ),
        };
        line(format!("path: {path}"));
        let rows: Vec<String> = self.matrix.iter().map(|r| format!("[{}]", r.join(","))).collect();
        line(format!("matrix: [{}]", rows.join(",")));
        line(format!("r = {}, Q = {}, g = {}", self.r, self.q.display, self.g));
        if let Some(cl) = &self.constant_length {
            line(format!(
                "h = {}, odometer base ({}, {}, {}, …), occurrence gcd stable at prefix {}",
                cl.h, cl.odometer_base[0], cl.l, cl.l, cl.stabilized_at
            ));
        }
        line(format!(
            "F: {}, F*: {}",
            if self.f_finite { "finite" } else { "infinite" },
            if self.fstar_finite { "finite" } else { "infinite" }
        ));
        line(format!("odometer primes: [{}]", self.odometer_primes.join(", ")));
        match &self.candidate_primes {
            Some(c) => line(format!("candidate spectrum primes (heuristic): [{}]", c.join(", "))),
            None => line("candidate spectrum primes: unavailable (det M = 0)".into()),
        }
        if !self.valid {
            line("warning: periodic input; the verdict does not apply".into());
        }
        for n in &self.notes {
            line(format!("note: {n}"));
        }
        out
    }
}
