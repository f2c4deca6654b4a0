//! End-to-end analysis of a web at several sample points.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::connection::{compute_connection, format_value, ConnectionData, SubbundleResult, Witness};
use crate::engine::{assemble_systems, build_mtable, c, Ordinariness, RecurrencePath, Systems, WebDims, WebJets};
use crate::error::Error;
use crate::linalg::JetMatrix;
use crate::sample::{sample_point, SamplePoint};
use crate::{Rational, WebSpec};

#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    pub points: usize,
    pub seed: u64,
    pub height: u64,
    /// Jet order of the first integrals; `k0 + 1` when unset.
    pub order: Option<usize>,
    /// Seeded reorderings of the integrals to try when `YYY` is singular everywhere.
    pub try_permutations: usize,
    /// On a non-flat verdict, look for the largest invariant flat prefix.
    pub prefix_scan: bool,
    /// 0-based basis indices of a subbundle to test.
    pub subbundle: Option<Vec<usize>>,
    /// Explicit base point; disables sampling.
    pub at: Option<Vec<Rational>>,
    /// Draws allowed per point before giving up on it.
    pub max_attempts: usize,
    /// Draws allowed per point when `YYY` keeps coming out singular; a
    /// singularity that survives several generic points is structural.
    pub max_singular_draws: usize,
    pub timings: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            points: 3,
            seed: 0,
            height: 1000,
            order: None,
            try_permutations: 0,
            prefix_scan: false,
            subbundle: None,
            at: None,
            max_attempts: 20,
            max_singular_draws: 3,
            timings: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Flat,
    NotFlat,
    NotCalibrated,
    NotOrdinary,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Flat => 0,
            Verdict::NotFlat => 1,
            Verdict::NotCalibrated => 2,
            Verdict::NotOrdinary => 3,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Flat => "FLAT",
            Verdict::NotFlat => "NOT-FLAT",
            Verdict::NotCalibrated => "NOT-CALIBRATED",
            Verdict::NotOrdinary => "NOT-ORDINARY",
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct StageTimes {
    pub jets_ms: f64,
    pub systems_ms: f64,
    pub connection_ms: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Discarded {
    pub attempt: u64,
    pub coords: Vec<String>,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PointReport {
    pub index: usize,
    pub attempt: u64,
    pub coords: Vec<String>,
    pub discarded: Vec<Discarded>,
    pub weak_general_position: bool,
    pub ordinariness: Ordinariness,
    /// `None` when the point is not ordinary or the web is not calibrated.
    pub yyy_invertible: Option<bool>,
    pub flat: Option<bool>,
    /// Every curvature entry has zero rational part (nilpotent parts may remain).
    pub flat_modulo_nilpotents: Option<bool>,
    pub nilpotent_curvature: Option<bool>,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<StageTimes>,
    #[serde(skip)]
    pub connection: Option<ConnectionData>,
}

impl PointReport {
    pub fn accepted(&self) -> bool {
        self.connection.is_some()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WebSummary {
    pub n: usize,
    pub d: usize,
    pub integrals: Vec<String>,
    pub params: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankBounds {
    pub lower: usize,
    pub upper: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct SubbundleReport {
    /// 1-based basis indices.
    pub indices: Vec<usize>,
    pub invariant: bool,
    pub flat_restriction: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema: u32,
    pub source: String,
    pub web: WebSummary,
    pub dims: WebDims,
    pub pi_prime: usize,
    pub order: usize,
    pub seed: u64,
    pub height: u64,
    pub points_requested: usize,
    /// 1-based original indices, in the order used; absent when the
    /// given order worked.
    pub permutation: Option<Vec<usize>>,
    pub permutations_tried: usize,
    pub points: Vec<PointReport>,
    pub ordinary_points: usize,
    pub accepted_points: usize,
    pub verdict: Verdict,
    pub rank: RankBounds,
    pub witness: Option<Witness>,
    pub subbundle: Option<SubbundleReport>,
    /// Size of the largest invariant prefix with flat restriction.
    pub flat_prefix: Option<usize>,
    pub notes: Vec<String>,
}

impl AnalysisReport {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

/// Jets, systems and, when possible, the connection at one point.
pub struct PointComputation {
    pub jets: WebJets,
    pub systems: Systems,
    pub ordinariness: Ordinariness,
    pub connection: Option<Result<ConnectionData, Error>>,
    pub times: StageTimes,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1000.0
}

/// Runs the pipeline at `p`. The connection is attempted only for a
/// calibrated web that is ordinary at `p`.
pub fn compute_at(web: &WebSpec, dims: &WebDims, p: &SamplePoint, order: usize) -> Result<PointComputation, Error> {
    let t = Instant::now();
    let jets = WebJets::evaluate(web, p, order)?;
    let jets_ms = ms(t);
    let t = Instant::now();
    let mt = build_mtable(&jets, dims.k0, RecurrencePath::First)?;
    let systems = assemble_systems(&mt, dims);
    let ordinariness = crate::engine::ordinariness_check(&systems, dims);
    let systems_ms = ms(t);
    let t = Instant::now();
    let connection = (dims.calibrated && ordinariness.ordinary).then(|| compute_connection(&systems, &jets, dims));
    let connection_ms = ms(t);
    Ok(PointComputation {
        jets,
        systems,
        ordinariness,
        connection,
        times: StageTimes {
            jets_ms,
            systems_ms,
            connection_ms,
        },
    })
}

fn coords_strings(p: &SamplePoint) -> Vec<String> {
    p.coords.iter().map(ToString::to_string).collect()
}

/// Whether another draw might help.
fn is_point_specific(e: &Error) -> bool {
    matches!(e, Error::DivisionByNonUnit | Error::SingularAtPoint { .. })
}

fn analyze_point(web: &WebSpec, dims: &WebDims, index: usize, opts: &AnalysisOptions, order: usize) -> Result<PointReport, Error> {
    let mut discarded = Vec::new();
    let mut last_singular: Option<PointReport> = None;
    let mut singular_draws = 0;
    let attempts: Vec<(u64, SamplePoint)> = match &opts.at {
        Some(coords) => vec![(0, SamplePoint::explicit(coords.clone()))],
        None => (0..opts.max_attempts)
            .map(|k| {
                let attempt = (index + k * opts.points) as u64;
                (attempt, sample_point(web.n, opts.seed, attempt, opts.height))
            })
            .collect(),
    };
    for (attempt, p) in attempts {
        let comp = match compute_at(web, dims, &p, order) {
            Ok(c) => c,
            Err(e) if is_point_specific(&e) => {
                discarded.push(Discarded {
                    attempt,
                    coords: coords_strings(&p),
                    reason: e.to_string(),
                });
                continue;
            }
            Err(e) => return Err(e),
        };
        let mut report = PointReport {
            index,
            attempt,
            coords: coords_strings(&p),
            discarded: Vec::new(),
            weak_general_position: comp.jets.weak_general_position(),
            ordinariness: comp.ordinariness.clone(),
            yyy_invertible: None,
            flat: None,
            flat_modulo_nilpotents: None,
            nilpotent_curvature: None,
            witness: None,
            timings: opts.timings.then(|| comp.times.clone()),
            connection: None,
        };
        match comp.connection {
            None => {
                report.discarded = discarded;
                return Ok(report);
            }
            Some(Ok(conn)) => {
                report.yyy_invertible = Some(true);
                report.flat = Some(conn.is_flat());
                report.flat_modulo_nilpotents = Some(conn.residue_flat());
                report.nilpotent_curvature = Some(conn.has_nilpotent_curvature());
                report.witness = conn.witness();
                report.connection = Some(conn);
                report.discarded = discarded;
                return Ok(report);
            }
            Some(Err(e)) if is_point_specific(&e) => {
                discarded.push(Discarded {
                    attempt,
                    coords: coords_strings(&p),
                    reason: e.to_string(),
                });
                report.yyy_invertible = Some(false);
                last_singular = Some(report);
                singular_draws += 1;
                if singular_draws >= opts.max_singular_draws {
                    break;
                }
            }
            Some(Err(e)) => return Err(e),
        }
    }
    match last_singular {
        Some(mut r) => {
            r.discarded = discarded;
            Ok(r)
        }
        None => Err(Error::SingularAtPoint {
            what: "every sampled base point (all draws hit poles)",
        }),
    }
}

/// Integral orders tried: the given one, then seeded shuffles.
fn permutation(d: usize, seed: u64, k: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..d).collect();
    if k > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((1u64 << 32) + k as u64);
        perm.shuffle(&mut rng);
    }
    perm
}

fn run_points(web: &WebSpec, dims: &WebDims, opts: &AnalysisOptions, order: usize) -> Result<Vec<PointReport>, Error> {
    let n_points = if opts.at.is_some() { 1 } else { opts.points };
    (0..n_points)
        .into_par_iter()
        .map(|k| analyze_point(web, dims, k, opts, order))
        .collect()
}

/// Analyzes `web`; `source` labels the input in the report.
pub fn analyze(web: &WebSpec, source: &str, opts: &AnalysisOptions) -> Result<AnalysisReport, Error> {
    if opts.points == 0 && opts.at.is_none() {
        return Err(Error::OutOfRange("at least one sample point is required".into()));
    }
    if let Some(at) = &opts.at {
        if at.len() != web.n {
            return Err(Error::ShapeMismatch(format!("--at needs {} coordinates, got {}", web.n, at.len())));
        }
    }
    let dims = WebDims::new(web.n, web.d());
    let order = opts.order.unwrap_or(dims.k0 + 1);
    let mut notes = Vec::new();
    if !dims.calibrated {
        notes.push(format!(
            "d = {} is not c(n, k0) = {}: only the bound rank <= {} applies",
            dims.d,
            c(dims.n, dims.k0),
            dims.ro
        ));
    }

    let mut permutations_tried = 0;
    let mut used_perm = None;
    let mut points = run_points(web, &dims, opts, order)?;
    let all_yyy_singular = |pts: &[PointReport]| {
        pts.iter().any(|p| p.yyy_invertible == Some(false)) && pts.iter().all(|p| !p.accepted())
    };
    if dims.calibrated && all_yyy_singular(&points) && opts.at.is_none() {
        for k in 1..=opts.try_permutations {
            permutations_tried = k;
            let perm = permutation(web.d(), opts.seed, k);
            let candidate = run_points(&web.permuted(&perm), &dims, opts, order)?;
            if !all_yyy_singular(&candidate) {
                points = candidate;
                used_perm = Some(perm.iter().map(|i| i + 1).collect::<Vec<_>>());
                break;
            }
        }
        if used_perm.is_none() {
            return Err(Error::SingularAtPoint {
                what: "YYY at every sample point (try --try-permutations to reorder the integrals)",
            });
        }
        notes.push("the given integral order made YYY singular; a reordering was used".to_string());
    }

    let ordinary_points = points.iter().filter(|p| p.ordinariness.ordinary).count();
    let accepted: Vec<&ConnectionData> = points.iter().filter_map(|p| p.connection.as_ref()).collect();
    if ordinary_points > 0 && ordinary_points < points.len() {
        notes.push(format!(
            "ordinary at {ordinary_points} of {} sample points; non-ordinary points are ignored",
            points.len()
        ));
    }

    let verdict = if !dims.calibrated {
        Verdict::NotCalibrated
    } else if ordinary_points == 0 {
        Verdict::NotOrdinary
    } else if accepted.iter().all(|c| c.is_flat()) {
        Verdict::Flat
    } else {
        Verdict::NotFlat
    };

    let witness = points.iter().find_map(|p| p.witness.clone());

    let subbundle = opts.subbundle.as_ref().filter(|_| !accepted.is_empty()).map(|idx| {
        let results: Vec<SubbundleResult> = accepted.iter().map(|c| c.subbundle(idx)).collect();
        SubbundleReport {
            indices: idx.iter().map(|i| i + 1).collect(),
            invariant: results.iter().all(|r| r.invariant),
            flat_restriction: results.iter().all(|r| r.flat_restriction),
        }
    });

    let flat_prefix = (opts.prefix_scan && verdict == Verdict::NotFlat).then(|| {
        (1..dims.ro)
            .rev()
            .find(|&m| {
                let idx: Vec<usize> = (0..m).collect();
                accepted.iter().all(|c| c.subbundle(&idx).flat_restriction)
            })
            .unwrap_or(0)
    });

    let mut lower = flat_prefix.unwrap_or(0);
    if let Some(s) = &subbundle {
        if s.invariant && s.flat_restriction {
            lower = lower.max(s.indices.len());
        }
    }
    let rank = match verdict {
        Verdict::Flat => RankBounds {
            lower: dims.ro,
            upper: dims.ro,
        },
        Verdict::NotFlat => RankBounds {
            lower,
            upper: dims.ro - 1,
        },
        Verdict::NotCalibrated | Verdict::NotOrdinary => RankBounds {
            lower: 0,
            upper: dims.ro,
        },
    };
    if accepted.len() < points.len() && verdict != Verdict::NotCalibrated {
        let skipped = points.len() - accepted.len();
        if skipped > 0 && ordinary_points > 0 {
            notes.push(format!("{skipped} point(s) did not reach the curvature stage"));
        }
    }
    if matches!(verdict, Verdict::Flat | Verdict::NotFlat) {
        notes.push(format!(
            "curvature checked exactly at {} random rational point(s) of height <= {}; a vanishing result is probabilistic evidence",
            accepted.len(),
            opts.height
        ));
    }

    Ok(AnalysisReport {
        schema: 1,
        source: source.to_string(),
        web: WebSummary {
            n: web.n,
            d: web.d(),
            integrals: web.integrals.iter().map(ToString::to_string).collect(),
            params: web.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
        },
        dims,
        pi_prime: dims.ro,
        order,
        seed: opts.seed,
        height: opts.height,
        points_requested: if opts.at.is_some() { 1 } else { opts.points },
        permutation: used_perm,
        permutations_tried,
        accepted_points: accepted.len(),
        ordinary_points,
        points,
        verdict,
        rank,
        witness,
        subbundle,
        flat_prefix,
        notes,
    })
}

/// A matrix rendered at the base point.
#[derive(Clone, Debug, Serialize)]
pub struct RenderedMatrix {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<String>>,
}

pub fn render(name: &str, m: &JetMatrix) -> RenderedMatrix {
    RenderedMatrix {
        name: name.to_string(),
        rows: m.rows(),
        cols: m.cols(),
        entries: (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| format_value(m.get(r, c))).collect())
            .collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatricesReport {
    pub schema: u32,
    pub source: String,
    pub dims: WebDims,
    pub coords: Vec<String>,
    pub ordinariness: Ordinariness,
    pub matrices: Vec<RenderedMatrix>,
    /// Why the listing stops early, if it does.
    pub stopped: Option<String>,
}

/// Values of `MM`, `QQ`, `PP`, `W`, `U`, `A(i)` and `K(r,s)` at one point.
pub fn matrices_at(web: &WebSpec, source: &str, p: &SamplePoint, order: Option<usize>) -> Result<MatricesReport, Error> {
    let dims = WebDims::new(web.n, web.d());
    let order = order.unwrap_or(dims.k0 + 1);
    let comp = compute_at(web, &dims, p, order)?;
    let mut matrices = vec![
        render("MM", &comp.systems.mm),
        render("QQ", &comp.systems.qq),
        render("PP", &comp.systems.pp),
    ];
    let stopped = match comp.connection {
        None if !dims.calibrated => Some("web is not calibrated".to_string()),
        None => Some("web is not ordinary at this point".to_string()),
        Some(Err(e)) => Some(e.to_string()),
        Some(Ok(conn)) => {
            matrices.push(render("W", &conn.triv.w));
            matrices.push(render("U", &conn.u));
            for (i, a) in conn.a.iter().enumerate() {
                matrices.push(render(&format!("A({})", i + 1), a));
            }
            for (r, s, k) in &conn.k {
                matrices.push(render(&format!("K({},{})", r + 1, s + 1), k));
            }
            None
        }
    };
    Ok(MatricesReport {
        schema: 1,
        source: source.to_string(),
        dims,
        coords: coords_strings(p),
        ordinariness: comp.ordinariness,
        matrices,
        stopped,
    })
}
