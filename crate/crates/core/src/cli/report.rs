//! Command reports: a JSON form that round-trips, and prose.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::approx::{ApproxVerdict, OrbitalModel};
use crate::decomp::{vector_to_pairs, DecompositionSummary};
use crate::linalg::CMatrix;
use crate::manybody::SubgroupFactorization;
use crate::operators::StatementKind;
use crate::selftest::SelftestReport;
use crate::verdicts::{CorrelationCheck, Criterion, PropertyLevel, PropertyReport, Verdict, Witness};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub type Pairs = Vec<[f64; 2]>;

fn matrix_to_pairs(m: &CMatrix) -> Vec<Pairs> {
    m.row_iter().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    pub arguments: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    /// `product`, `antisymmetrized`, `symmetrized_orthogonal` or `same_state`.
    pub form: String,
    pub vectors: Vec<Pairs>,
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        let form = match w {
            Witness::Product { .. } => "product",
            Witness::Antisymmetrized { .. } => "antisymmetrized",
            Witness::SymmetrizedOrthogonal { .. } => "symmetrized_orthogonal",
            Witness::SameState { .. } => "same_state",
        };
        Self { form: form.into(), vectors: w.vectors().into_iter().map(vector_to_pairs).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub statistics: String,
    pub entangled: bool,
    pub criterion: Criterion,
    pub witness: Option<WitnessRecord>,
    pub alternates: Vec<Pairs>,
    pub statements: Vec<String>,
    /// Property level of the particle in slot 0 (distinguishable pairs) or
    /// of each constituent (identical pairs) when it is determined.
    pub properties: Option<PropertyLevel>,
}

impl ClassificationRecord {
    pub fn new(statistics: String, v: &Verdict, properties: Option<PropertyLevel>) -> Self {
        Self {
            statistics,
            entangled: v.entangled,
            criterion: v.criterion,
            witness: v.witness.as_ref().map(WitnessRecord::from),
            alternates: v.alternates.iter().map(vector_to_pairs).collect(),
            statements: v.statements.clone(),
            properties,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatementRecord {
    pub observable: Vec<Pairs>,
    pub values: Vec<f64>,
    pub kind: StatementKind,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertiesRecord {
    pub slot: usize,
    pub level: PropertyLevel,
    pub range_rank: usize,
    pub range_projector: Vec<Pairs>,
    pub reduced_spectrum: Vec<f64>,
    pub statements: Vec<StatementRecord>,
}

impl From<&PropertyReport> for PropertiesRecord {
    fn from(r: &PropertyReport) -> Self {
        Self {
            slot: r.slot,
            level: r.level,
            range_rank: r.range_projector.rank(),
            range_projector: matrix_to_pairs(r.range_projector.matrix()),
            reduced_spectrum: r.reduced_spectrum.clone(),
            statements: r
                .statements
                .iter()
                .map(|s| StatementRecord {
                    observable: matrix_to_pairs(&s.observable),
                    values: s.values.clone(),
                    kind: s.kind,
                    text: s.to_string(),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub joint: [f64; 2],
    pub product: [f64; 2],
    pub residual: f64,
    pub factorizes: bool,
    pub tolerance: f64,
}

impl CorrelationRecord {
    pub fn new(c: &CorrelationCheck, tolerance: f64) -> Self {
        Self { joint: [c.joint.re, c.joint.im], product: [c.product.re, c.product.im], residual: c.residual, factorizes: c.factorizes, tolerance }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpoRecord {
    pub residual: f64,
    pub one_particle_orthogonal: bool,
    pub support_overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubgroupRecord {
    pub m: usize,
    pub k: usize,
    pub found: bool,
    /// Amplitudes of the `M`- and `K`-particle factors, row-major.
    pub pi_m: Option<Pairs>,
    pub phi_k: Option<Pairs>,
    pub delta: Option<Vec<Pairs>>,
    pub delta_star: Option<Vec<Pairs>>,
    pub opo_residual: Option<f64>,
    pub fidelity: Option<f64>,
}

impl SubgroupRecord {
    pub fn new(m: usize, k: usize, f: Option<&SubgroupFactorization>) -> Self {
        let amps = |s: &crate::hilbert::StateVector| s.amplitudes().iter().map(|z| [z.re, z.im]).collect::<Pairs>();
        Self {
            m,
            k,
            found: f.is_some(),
            pi_m: f.map(|f| amps(&f.pi_m)),
            phi_k: f.map(|f| amps(&f.phi_k)),
            delta: f.map(|f| columns(&f.delta)),
            delta_star: f.map(|f| columns(&f.delta_star)),
            opo_residual: f.map(|f| f.opo_residual),
            fidelity: f.map(|f| f.fidelity),
        }
    }
}

fn columns(m: &CMatrix) -> Vec<Pairs> {
    m.column_iter().map(|c| vector_to_pairs(&c.into_owned())).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapRecord {
    pub model: OrbitalModel,
    pub unit: String,
    pub verdict: ApproxVerdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    Classification(ClassificationRecord),
    Properties(PropertiesRecord),
    Correlation(CorrelationRecord),
    Decomposition(DecompositionSummary),
    Opo(OpoRecord),
    Subgroup(SubgroupRecord),
    Overlap(OverlapRecord),
    Selftest(SelftestReport),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: CommandEcho,
    pub tool_version: String,
    pub payload: Payload,
    pub diagnostics: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(command: CommandEcho, payload: Payload, diagnostics: BTreeMap<String, f64>) -> Self {
        Self { command, tool_version: TOOL_VERSION.into(), payload, diagnostics }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports contain only finite numbers and strings")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Prose rendering.
    pub fn render_human(&self) -> String {
        let mut out = String::new();
        match &self.payload {
            Payload::Classification(c) => {
                let _ = writeln!(out, "{} pair: {}", c.statistics, if c.entangled { "entangled" } else { "non-entangled" });
                let _ = writeln!(out, "criterion: {}", c.criterion);
                if let Some(level) = c.properties {
                    let _ = writeln!(out, "properties: {level:?}");
                }
                for s in &c.statements {
                    let _ = writeln!(out, "- {s}");
                }
            }
            Payload::Properties(p) => {
                let _ = writeln!(out, "slot {}: {:?} (range rank {})", p.slot, p.level, p.range_rank);
                let _ = writeln!(out, "reduced spectrum: {}", fmt_list(&p.reduced_spectrum));
                for s in &p.statements {
                    let _ = writeln!(out, "- {}", s.text);
                }
            }
            Payload::Correlation(c) => {
                let _ = writeln!(out, "<A⊗B> = {}", fmt_pair(c.joint));
                let _ = writeln!(out, "<A⊗I><I⊗B> = {}", fmt_pair(c.product));
                let _ = writeln!(
                    out,
                    "residual {:.3e}: {}",
                    c.residual,
                    if c.factorizes { "factorizes" } else { "does not factorize" }
                );
            }
            Payload::Decomposition(d) => {
                let _ = writeln!(out, "{} rank {}", d.kind, d.rank);
                let _ = writeln!(out, "coefficients: {}", fmt_list(&d.coefficients));
            }
            Payload::Opo(o) => {
                let _ = writeln!(out, "one-particle orthogonality residual {:.3e}", o.residual);
                let _ = writeln!(out, "support overlap {:.3e}", o.support_overlap);
                let _ = writeln!(out, "{}", if o.one_particle_orthogonal { "one-particle orthogonal" } else { "not one-particle orthogonal" });
            }
            Payload::Subgroup(s) => {
                if s.found {
                    let _ = writeln!(out, "non-entangled subgroups of {} and {} particles found", s.m, s.k);
                    let _ = writeln!(out, "fidelity {:.12}", s.fidelity.unwrap_or(0.0));
                } else {
                    let _ = writeln!(out, "no one-particle-orthogonal split into {} and {} particles", s.m, s.k);
                }
            }
            Payload::Overlap(o) => {
                let _ = writeln!(out, "log10 overlap = {:.6e} (d/a = {:.6e})", o.verdict.log10_overlap, o.model.ratio());
                let _ = writeln!(
                    out,
                    "{} at threshold {}",
                    if o.verdict.almost_nonentangled { "almost non-entangled" } else { "not separated" },
                    o.verdict.threshold_log10
                );
                let _ = writeln!(out, "note: {}", o.verdict.caveat);
            }
            Payload::Selftest(r) => {
                let _ = writeln!(out, "seed {}", r.seed);
                for s in &r.suites {
                    let _ = writeln!(out, "[{}] {} ({} trials, {} failures){}", if s.passed() { "ok" } else { "FAIL" }, s.name, s.trials, s.failures,
                        if s.detail.is_empty() { String::new() } else { format!(": {}", s.detail) });
                }
            }
        }
        if !self.diagnostics.is_empty() {
            let _ = writeln!(out, "diagnostics:");
            for (k, v) in &self.diagnostics {
                let _ = writeln!(out, "  {k} = {v}");
            }
        }
        out
    }
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(", ")
}

fn fmt_pair(z: [f64; 2]) -> String {
    if z[1] == 0.0 {
        format!("{:.6}", z[0])
    } else {
        format!("{:.6}{:+.6}i", z[0], z[1])
    }
}
