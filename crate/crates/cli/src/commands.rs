use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use subshift::analysis::{
    analyze_morphism, factor_count_bound, power_in_spectrum, restricted_char_poly, VerdictOptions,
};
use subshift::morphism::Periodicity;
use subshift::properize::properize;
use subshift::returnwords::{return_words_closure, return_words_in_prefix, sadic_decomposition};
use subshift::sadic::{
    lr_diagnostics, lr_estimate, primitive_window_check, rotation_coding_prefix, sadic_prefix,
    sturmian_directive, ContinuedFraction, DirectiveSequence, LrDiagnostics, PropertyCheck,
};
use subshift::words::factor_set;
use subshift::{Morphism, Substitution, Word};

use crate::input::{parse_input, parse_morphism, Input, ParseError, Rules};
use crate::report::{self, PeriodicityReport, VerdictReport};
use crate::Command;

const STURMIAN_CHECK_MAX_N: usize = 12;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Analysis(#[from] subshift::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Analysis(_) => 1,
            _ => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Analysis(_) => "analysis",
        }
    }
}

pub struct Output {
    pub text: String,
    pub json: Value,
    /// Non-zero when a requested check or a batch member failed; the
    /// report is still printed.
    pub exit: u8,
}

impl Output {
    fn ok<T: Serialize>(text: String, value: &T) -> Self {
        Self { text, json: serde_json::to_value(value).expect("serializable report"), exit: 0 }
    }
}

pub fn run(command: Command) -> Result<Output, CliError> {
    match command {
        Command::Analyze { files, horizon } => analyze(&files, horizon),
        Command::Properize { file, emit } => properize_cmd(&file, emit.as_deref()),
        Command::ReturnWords { file, anchor, prefix_len } => return_words(&file, &anchor, prefix_len),
        Command::Derived { file } => derived(&file),
        Command::Spectrum { file, p, nmax } => spectrum(&file, p, nmax),
        Command::Sturmian { cf, len, check, s0 } => sturmian(cf, len, check, s0),
        Command::LrEstimate { file, cf, prefix_len, max_anchor, k, s0 } => {
            lr(file.as_deref(), cf, prefix_len, max_anchor, k, s0)
        }
        Command::SadicDecompose { file, depth, k, prefix_len } => {
            sadic_decompose(&file, depth, k, prefix_len)
        }
        Command::Bound { k } => bound(k),
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

fn load_input(path: &Path) -> Result<Input, CliError> {
    let text = read(path)?;
    parse_input(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

fn load_morphism(path: &Path) -> Result<Morphism, CliError> {
    let text = read(path)?;
    parse_morphism(&text).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
}

/// The substitution after the seed policy, with the power used.
fn load_substitution(path: &Path) -> Result<(Substitution, usize), CliError> {
    Ok(Substitution::seeded(load_morphism(path)?)?)
}

fn probe(sigma: &Substitution) -> Result<Periodicity, CliError> {
    Ok(sigma.periodicity_probe(subshift::analysis::DEFAULT_PROBE_HORIZON)?)
}

fn analyze(files: &[PathBuf], horizon: usize) -> Result<Output, CliError> {
    let options = VerdictOptions { probe_horizon: horizon };
    let run_one = |path: &PathBuf| -> Result<VerdictReport, CliError> {
        let verdict = analyze_morphism(&load_morphism(path)?, options)?;
        Ok(VerdictReport::new(&path.display().to_string(), &verdict))
    };
    if let [single] = files {
        let r = run_one(single)?;
        return Ok(Output::ok(r.text(), &r));
    }

    let results: Vec<Mutex<Option<Result<VerdictReport, CliError>>>> =
        files.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = thread::available_parallelism().map_or(1, |n| n.get()).min(files.len());
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(path) = files.get(i) else { break };
                *results[i].lock().expect("unpoisoned") = Some(run_one(path));
            });
        }
    });

    let mut text = String::new();
    let mut values = Vec::with_capacity(files.len());
    let mut worst = 0u8;
    for (path, slot) in files.iter().zip(results) {
        match slot.into_inner().expect("unpoisoned").expect("every file analysed") {
            Ok(r) => {
                text.push_str(&r.text());
                values.push(serde_json::to_value(&r).expect("serializable report"));
            }
            Err(e) => {
                worst = worst.max(e.exit_code());
                let _ = writeln!(text, "input: {}\nerror: {e}", path.display());
                values.push(json!({ "input": path.display().to_string(), "error": e.to_string(), "kind": e.kind() }));
            }
        }
        text.push('\n');
    }
    Ok(Output { text, json: Value::Array(values), exit: worst })
}

#[derive(Serialize)]
struct ProperizeReport {
    input: String,
    periodicity: PeriodicityReport,
    pass_through: bool,
    tau_power: usize,
    zeta_power: usize,
    alphabet: Vec<String>,
    phi: Vec<report::RuleReport>,
    psi: Option<Vec<report::RuleReport>>,
    zeta: Vec<report::RuleReport>,
    proper_letter: String,
    certified: bool,
}

fn rule_lines(out: &mut String, title: &str, rules: &[report::RuleReport]) {
    let _ = writeln!(out, "{title}:");
    for r in rules {
        let _ = writeln!(out, "  {} -> {}", r.letter, r.image.join(" "));
    }
}

fn properize_cmd(path: &Path, emit: Option<&Path>) -> Result<Output, CliError> {
    let (sigma, _) = load_substitution(path)?;
    let periodicity = probe(&sigma)?;
    let p = properize(&sigma)?;
    let r = ProperizeReport {
        input: path.display().to_string(),
        periodicity: (&periodicity).into(),
        pass_through: p.pass_through,
        tau_power: p.tau_power,
        zeta_power: p.zeta_power,
        alphabet: p.alphabet.tokens().to_vec(),
        phi: report::rules(&p.phi),
        psi: p.psi.as_ref().map(report::rules),
        zeta: report::rules(p.zeta.morphism()),
        proper_letter: p.alphabet.token(p.proper_letter()).to_string(),
        certified: true,
    };
    let mut text = String::new();
    let _ = writeln!(text, "periodicity: {}", r.periodicity.summary);
    if r.pass_through {
        let _ = writeln!(text, "already proper; ζ = σ");
    } else {
        let _ = writeln!(text, "τ power: {}, ζ power: {}", r.tau_power, r.zeta_power);
    }
    let _ = writeln!(text, "B: {}", r.alphabet.join(" "));
    rule_lines(&mut text, "phi", &r.phi);
    if let Some(psi) = &r.psi {
        rule_lines(&mut text, "psi", psi);
    }
    rule_lines(&mut text, "zeta", &r.zeta);
    let _ = writeln!(text, "proper letter: {}", r.proper_letter);
    if let Some(target) = emit {
        fs::write(target, Rules(p.zeta.morphism()).to_string())
            .map_err(|source| CliError::Io { path: target.display().to_string(), source })?;
        let _ = writeln!(text, "wrote ζ to {}", target.display());
    }
    Ok(Output::ok(text, &r))
}

#[derive(Serialize)]
struct ReturnWordsReport {
    input: String,
    anchor: String,
    periodicity: PeriodicityReport,
    prefix_len: usize,
    return_words: Vec<String>,
    min_return_len: usize,
    max_return_len: usize,
    /// Prefix-limited: more return words may exist further on.
    certified: bool,
}

fn return_words(path: &Path, anchor: &str, prefix_len: usize) -> Result<Output, CliError> {
    let (sigma, _) = load_substitution(path)?;
    let periodicity = probe(&sigma)?;
    let x = sigma.fixed_point_prefix(prefix_len)?.prefix(prefix_len);
    let u = sigma.alphabet().parse_word(anchor)?;
    let coding = return_words_in_prefix(&x, &u)?;
    let r = ReturnWordsReport {
        input: path.display().to_string(),
        anchor: u.to_string(),
        periodicity: (&periodicity).into(),
        prefix_len: x.len(),
        return_words: report::strings(&coding.return_words()),
        min_return_len: coding.min_return_len(),
        max_return_len: coding.max_return_len(),
        certified: coding.is_certified(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "periodicity: {}", r.periodicity.summary);
    let _ = writeln!(text, "return words to {} (prefix of length {}):", r.anchor, r.prefix_len);
    for (i, w) in r.return_words.iter().enumerate() {
        let _ = writeln!(text, "  {}: {w}", i + 1);
    }
    let _ = writeln!(text, "lengths: {}..={}", r.min_return_len, r.max_return_len);
    let _ = writeln!(text, "certified: {} (read off a finite prefix)", r.certified);
    Ok(Output::ok(text, &r))
}

#[derive(Serialize)]
struct DerivedReport {
    input: String,
    anchor: String,
    periodicity: PeriodicityReport,
    return_words: Vec<String>,
    tau: Vec<report::RuleReport>,
    tau_is_proper: bool,
    /// `σΘ = Θτ` checked exactly.
    certified: bool,
}

fn derived(path: &Path) -> Result<Output, CliError> {
    let (sigma, _) = load_substitution(path)?;
    let periodicity = probe(&sigma)?;
    let d = return_words_closure(&sigma)?;
    let certified = d.verify(&sigma).is_ok() && d.coding().is_certified();
    let r = DerivedReport {
        input: path.display().to_string(),
        anchor: d.coding().anchor().to_string(),
        periodicity: (&periodicity).into(),
        return_words: report::strings(&d.coding().return_words()),
        tau: report::rules(d.tau().morphism()),
        tau_is_proper: d.tau_is_proper(),
        certified,
    };
    let mut text = String::new();
    let _ = writeln!(text, "periodicity: {}", r.periodicity.summary);
    let _ = writeln!(text, "return words to {}:", r.anchor);
    for (i, w) in r.return_words.iter().enumerate() {
        let _ = writeln!(text, "  {}: {w}", i + 1);
    }
    rule_lines(&mut text, "tau", &r.tau);
    let _ = writeln!(text, "tau proper: {}", r.tau_is_proper);
    let _ = writeln!(text, "certified (σΘ = Θτ): {}", r.certified);
    Ok(Output::ok(text, &r))
}

#[derive(Serialize)]
struct SpectrumEntry {
    n: u32,
    bound: usize,
    witness: Option<usize>,
}

#[derive(Serialize)]
struct SpectrumReport {
    input: String,
    periodicity: PeriodicityReport,
    p: u64,
    properized: bool,
    r: usize,
    g: String,
    p_divides_g: bool,
    searches: Vec<SpectrumEntry>,
}

fn spectrum(path: &Path, p: u64, nmax: u32) -> Result<Output, CliError> {
    if nmax == 0 {
        return Err(CliError::Usage("nmax must be at least 1".into()));
    }
    let (sigma, _) = load_substitution(path)?;
    let periodicity = probe(&sigma)?;
    let proper = properize(&sigma)?;
    let searches = power_in_spectrum(&proper.zeta, p, nmax)?;
    let rcp = restricted_char_poly(&proper.zeta.incidence_matrix().transpose())?;
    let g = rcp.g();
    let r = SpectrumReport {
        input: path.display().to_string(),
        periodicity: (&periodicity).into(),
        p,
        properized: !proper.pass_through,
        r: rcp.r,
        p_divides_g: (&g % p) == 0.into(),
        g: g.to_string(),
        searches: searches
            .iter()
            .map(|s| SpectrumEntry { n: s.n, bound: s.bound, witness: s.witness })
            .collect(),
    };
    let mut text = String::new();
    let _ = writeln!(text, "periodicity: {}", r.periodicity.summary);
    if r.properized {
        let _ = writeln!(text, "searched on the proper substitution ζ");
    }
    let _ = writeln!(text, "r = {}, g = {}, {} | g: {}", r.r, r.g, p, r.p_divides_g);
    for s in &r.searches {
        match s.witness {
            Some(m) => {
                let _ = writeln!(text, "p^{}: M^{m} e ≡ 0 (searched m ≤ {})", s.n, s.bound);
            }
            None => {
                let _ = writeln!(text, "p^{}: no m ≤ {}", s.n, s.bound);
            }
        }
    }
    Ok(Output::ok(text, &r))
}

fn continued_fraction(cf: Vec<u64>) -> Result<ContinuedFraction, CliError> {
    ContinuedFraction::new(cf).map_err(|e| CliError::Usage(e.to_string()))
}

#[derive(Serialize)]
struct LanguageCheck {
    max_n: usize,
    passed: bool,
    /// First length at which the factor sets differ.
    mismatch_at: Option<usize>,
}

#[derive(Serialize)]
struct WindowReport {
    s0: usize,
    windows: usize,
    passed: bool,
}

#[derive(Serialize)]
struct SturmianReport {
    cf: Vec<u64>,
    directive: Vec<String>,
    prefix: String,
    check: Option<LanguageCheck>,
    window: Option<WindowReport>,
}

fn window_report(d: &DirectiveSequence, s0: usize) -> WindowReport {
    let w = primitive_window_check(d, s0);
    WindowReport { s0, windows: w.windows.len(), passed: w.passed() }
}

fn sturmian(cf: Vec<u64>, len: usize, check: bool, s0: Option<usize>) -> Result<Output, CliError> {
    let fraction = continued_fraction(cf.clone())?;
    let d = sturmian_directive(&fraction, len)?;
    let prefix = sadic_prefix(&d, len)?;
    let language = if check {
        let rotation = rotation_coding_prefix(&fraction, len)?;
        let max_n = STURMIAN_CHECK_MAX_N.min(len);
        let mismatch_at = (1..=max_n).find(|&n| {
            factor_set(&prefix, n).expect("n ≤ len") != factor_set(&rotation, n).expect("n ≤ len")
        });
        Some(LanguageCheck { max_n, passed: mismatch_at.is_none(), mismatch_at })
    } else {
        None
    };
    let r = SturmianReport {
        cf,
        directive: d.directive().iter().map(|&i| d.names()[i].clone()).collect(),
        prefix: prefix.to_string(),
        window: s0.map(|s| window_report(&d, s)),
        check: language,
    };
    let mut text = String::new();
    let _ = writeln!(text, "{}", r.prefix);
    let runs: Vec<String> =
        d.runs()
            .iter()
            .map(|&(i, n)| if n == 1 { d.names()[i].clone() } else { format!("{}^{n}", d.names()[i]) })
            .collect();
    let _ = writeln!(text, "directive: {}", runs.join(" "));
    if let Some(c) = &r.check {
        let verdict = if c.passed { "pass" } else { "FAIL" };
        let _ = writeln!(text, "rotation oracle, factor sets for n ≤ {}: {verdict}", c.max_n);
    }
    if let Some(w) = &r.window {
        let _ = writeln!(text, "{}-windows positive: {} ({} windows)", w.s0, w.passed, w.windows);
    }
    let passed = r.check.as_ref().is_none_or(|c| c.passed);
    let mut out = Output::ok(text, &r);
    out.exit = if passed { 0 } else { 1 };
    Ok(out)
}

#[derive(Serialize)]
struct AnchorReport {
    anchor: String,
    occurrences: usize,
    card: usize,
    min_return: usize,
    max_return: usize,
}

#[derive(Serialize)]
struct CheckReport {
    passed: bool,
    witness: Option<String>,
}

impl From<&PropertyCheck> for CheckReport {
    fn from(c: &PropertyCheck) -> Self {
        Self { passed: c.passed, witness: c.witness.clone() }
    }
}

#[derive(Serialize)]
struct DiagnosticsReport {
    k: usize,
    max_len: usize,
    complexity: CheckReport,
    power_free: CheckReport,
    window: CheckReport,
    return_card: CheckReport,
    passed: bool,
}

impl From<&LrDiagnostics> for DiagnosticsReport {
    fn from(d: &LrDiagnostics) -> Self {
        Self {
            k: d.k,
            max_len: d.max_len,
            complexity: (&d.complexity).into(),
            power_free: (&d.power_free).into(),
            window: (&d.window).into(),
            return_card: (&d.return_card).into(),
            passed: d.passed(),
        }
    }
}

#[derive(Serialize)]
struct LrReport {
    source: String,
    periodicity: PeriodicityReport,
    prefix_len: usize,
    max_anchor_len: usize,
    ratio: Option<String>,
    ratio_value: Option<f64>,
    witness: Option<String>,
    scanned: usize,
    skipped: usize,
    certified: bool,
    anchors: Vec<AnchorReport>,
    diagnostics: Option<DiagnosticsReport>,
    window: Option<WindowReport>,
}

fn lr(
    file: Option<&Path>,
    cf: Option<Vec<u64>>,
    prefix_len: usize,
    max_anchor: usize,
    k: Option<usize>,
    s0: Option<usize>,
) -> Result<Output, CliError> {
    let (source, prefix, periodicity, window) = match (file, cf) {
        (Some(path), None) => match load_input(path)? {
            Input::Morphism(m) => {
                let (sigma, _) = Substitution::seeded(m)?;
                let x = sigma.fixed_point_prefix(prefix_len)?.prefix(prefix_len);
                (path.display().to_string(), x, (&probe(&sigma)?).into(), None)
            }
            Input::Directive(d) => {
                let x = sadic_prefix(&d, prefix_len)?;
                let w = s0.map(|s| window_report(&d, s));
                (path.display().to_string(), x, PeriodicityReport::not_probed(), w)
            }
        },
        (None, Some(cf)) => {
            let fraction = continued_fraction(cf.clone())?;
            let d = sturmian_directive(&fraction, prefix_len)?;
            let w = s0.map(|s| window_report(&d, s));
            let source = format!("sturmian {cf:?}");
            (source, sadic_prefix(&d, prefix_len)?, PeriodicityReport::not_probed(), w)
        }
        _ => return Err(CliError::Usage("give either an input file or --cf".into())),
    };
    if max_anchor == 0 {
        return Err(CliError::Usage("--max-anchor must be positive".into()));
    }
    let estimate = lr_estimate(&prefix, max_anchor)?;
    let diagnostics = match k {
        Some(k) if k > 0 => Some(lr_diagnostics(&prefix, k, max_anchor)?),
        Some(_) => return Err(CliError::Usage("--k must be positive".into())),
        None => None,
    };
    let r = LrReport {
        source,
        periodicity,
        prefix_len: estimate.prefix_len,
        max_anchor_len: estimate.max_anchor_len,
        ratio: estimate.ratio.map(|q| q.to_string()),
        ratio_value: estimate.ratio.map(|q| *q.numer() as f64 / *q.denom() as f64),
        witness: estimate.witness.as_ref().map(Word::to_string),
        scanned: estimate.anchors.len(),
        skipped: estimate.skipped,
        certified: estimate.certified,
        anchors: estimate
            .anchors
            .iter()
            .map(|a| AnchorReport {
                anchor: a.anchor.to_string(),
                occurrences: a.occurrences,
                card: a.card,
                min_return: a.min_return,
                max_return: a.max_return,
            })
            .collect(),
        diagnostics: diagnostics.as_ref().map(Into::into),
        window,
    };
    let mut text = String::new();
    let _ = writeln!(text, "source: {}", r.source);
    let _ = writeln!(text, "periodicity: {}", r.periodicity.summary);
    match (&r.ratio, &r.witness) {
        (Some(q), Some(w)) => {
            let _ = writeln!(text, "LR estimate: {q} (anchor {w})");
        }
        _ => {
            let _ = writeln!(text, "LR estimate: none (no anchor occurs three times)");
        }
    }
    let _ = writeln!(
        text,
        "anchors of length ≤ {}: {} scanned, {} skipped; prefix length {}; certified: {}",
        r.max_anchor_len, r.scanned, r.skipped, r.prefix_len, r.certified
    );
    if let Some(d) = &r.diagnostics {
        let _ = writeln!(text, "diagnostics with K = {} up to length {}:", d.k, d.max_len);
        for (name, c) in [
            ("complexity p(n) ≤ Kn", &d.complexity),
            ("(K+1)-power free", &d.power_free),
            ("window property", &d.window),
            ("Card R_u ≤ K(K+1)²", &d.return_card),
        ] {
            let status = if c.passed { "pass".to_string() } else { format!("fail ({})", c.witness.as_deref().unwrap_or("")) };
            let _ = writeln!(text, "  {name}: {status}");
        }
    }
    if let Some(w) = &r.window {
        let _ = writeln!(text, "{}-windows positive: {} ({} windows)", w.s0, w.passed, w.windows);
    }
    Ok(Output::ok(text, &r))
}

#[derive(Serialize)]
struct LevelReport {
    n: usize,
    anchor_len: usize,
    return_words: Vec<String>,
    lambda: Option<Vec<report::RuleReport>>,
}

#[derive(Serialize)]
struct SadicDecompositionReport {
    input: String,
    periodicity: PeriodicityReport,
    k: usize,
    alpha: usize,
    prefix_len: usize,
    levels: Vec<LevelReport>,
    reconstruction: String,
    certified: bool,
}

fn sadic_decompose(
    path: &Path,
    depth: usize,
    k: usize,
    prefix_len: Option<usize>,
) -> Result<Output, CliError> {
    if k == 0 || depth == 0 {
        return Err(CliError::Usage("--k and --depth must be positive".into()));
    }
    let (sigma, _) = load_substitution(path)?;
    let periodicity = probe(&sigma)?;
    let alpha = k * k * (k + 1);
    let len = match prefix_len {
        Some(n) => n,
        None => u32::try_from(depth)
            .ok()
            .and_then(|d| alpha.checked_pow(d))
            .and_then(|a| a.checked_mul(k + 1))
            .ok_or_else(|| CliError::Usage("α^depth is too large".into()))?,
    };
    let x = sigma.fixed_point_prefix(len)?.prefix(len);
    let dec = sadic_decomposition(&x, k, depth)?;
    let levels = dec
        .codings
        .iter()
        .enumerate()
        .map(|(n, c)| LevelReport {
            n,
            anchor_len: c.anchor().len(),
            return_words: report::strings(&c.return_words()),
            lambda: n.checked_sub(1).map(|i| report::rules(dec.recodings[i].lambda())),
        })
        .collect();
    let r = SadicDecompositionReport {
        input: path.display().to_string(),
        periodicity: (&periodicity).into(),
        k,
        alpha: dec.alpha,
        prefix_len: x.len(),
        levels,
        reconstruction: dec.reconstruction.to_string(),
        certified: false,
    };
    let mut text = String::new();
    let _ = writeln!(text, "periodicity: {}", r.periodicity.summary);
    let _ = writeln!(text, "K = {}, α = {}, prefix length {}", r.k, r.alpha, r.prefix_len);
    for level in &r.levels {
        let _ = writeln!(
            text,
            "level {}: anchor length {}, {} return words",
            level.n,
            level.anchor_len,
            level.return_words.len()
        );
        if let Some(lambda) = &level.lambda {
            rule_lines(&mut text, &format!("  lambda_{}", level.n), lambda);
        }
    }
    let _ = writeln!(text, "reconstruction λ_0⋯λ_{}(1): {}", depth, r.reconstruction);
    let _ = writeln!(text, "certified: false (return words read off a finite prefix)");
    Ok(Output::ok(text, &r))
}

#[derive(Serialize)]
struct BoundReport {
    k: u32,
    bound: String,
    digits: usize,
}

fn bound(k: u32) -> Result<Output, CliError> {
    let b = factor_count_bound(k).map_err(|e| CliError::Usage(e.to_string()))?;
    let s = b.to_string();
    let r = BoundReport { k, digits: s.len(), bound: s };
    Ok(Output::ok(format!("{}\n", r.bound), &r))
}
