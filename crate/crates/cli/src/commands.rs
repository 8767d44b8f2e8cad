use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use qudit_optics::kcolor::{
    er_graph_sweep, qubit_layer_unitary, qudit_layer_unitary, resource_estimate, run_qaoa,
    verify_cost_layer_pattern, ColoringInstance, Formulation, Graph, Qaoa, QaoaConfig, QaoaReport,
    SweepConfig, SweepRow, QUBIT_LAYER_CAP,
};
use qudit_optics::linalg::{random_state, CVector};
use qudit_optics::mbqc::{
    run_pattern, run_pattern_with_outcomes, ClusterGraph, MeasurementPattern, QuditState,
};
use qudit_optics::multirail::ns_gate;
use qudit_optics::synth::{synthesize, NamedTarget, SynthesisProblem, SynthesisStatus};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::angle::parse_angle;
use crate::output::{read_file, CmdResult, Document, ExitClass, Failure, Outcome};
use crate::GlobalArgs;

fn parse_failure(msg: impl Into<String>) -> Failure {
    Failure::new(ExitClass::Parse, msg)
}

#[derive(Serialize)]
struct Config<'a, A: Serialize> {
    seed: u64,
    #[serde(flatten)]
    args: &'a A,
}

// ---- ns ----

#[derive(Args, Debug, Serialize)]
pub struct NsArgs {
    /// Phase, e.g. `pi`, `2pi/3` or `1.2`.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: String,
    /// Random signal states used to check the heralded action.
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Serialize)]
struct NsReport {
    phi: f64,
    u: Vec<Vec<[f64; 2]>>,
    u12: f64,
    success_probability: f64,
    min_fidelity: f64,
    max_probability_deviation: f64,
}

/// Smallest heralded fidelity accepted on random signals.
const NS_FIDELITY: f64 = 1.0 - 1e-8;

pub fn ns(args: &NsArgs, g: &GlobalArgs) -> CmdResult<Outcome> {
    let phi = parse_angle(&args.phi).map_err(parse_failure)?;
    let seed = g.seed.unwrap_or(0);
    let gate = ns_gate(phi)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut min_fidelity: f64 = 1.0;
    let mut max_dev: f64 = 0.0;
    for _ in 0..args.samples {
        let a = random_state(3, &mut rng);
        let sim = gate.simulate([a[0], a[1], a[2]])?;
        min_fidelity = min_fidelity.min(sim.fidelity);
        max_dev = max_dev.max((sim.probability - gate.success_probability).abs());
    }
    let report = NsReport {
        phi,
        u: gate
            .u
            .row_iter()
            .map(|r| r.iter().map(|z| [z.re, z.im]).collect())
            .collect(),
        u12: gate.u12,
        success_probability: gate.success_probability,
        min_fidelity,
        max_probability_deviation: max_dev,
    };
    let row = vec![
        phi.to_string(),
        gate.u12.to_string(),
        gate.success_probability.to_string(),
        min_fidelity.to_string(),
    ];
    let doc = Document::new("ns", &Config { seed, args }, &report)?
        .with_table(&["phi", "u12", "success_probability", "min_fidelity"], vec![row]);
    let status = (min_fidelity < NS_FIDELITY).then(|| {
        Failure::new(
            ExitClass::Verification,
            format!("heralded fidelity {min_fidelity:.3e} below threshold"),
        )
    });
    Ok((doc, status))
}

// ---- synth ----

#[derive(Args, Debug, Serialize)]
pub struct SynthArgs {
    /// Named target (cz-qubit, czbar-qutrit, cz-qutrit, ns-pi, identity) or a
    /// problem JSON file.
    #[arg(long)]
    pub target: String,
    /// Ancilla photons; defaults to the target's known budget or the file.
    #[arg(long)]
    pub na: Option<usize>,
    /// Vacuum ancilla modes.
    #[arg(long)]
    pub nv: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
}

fn load_problem(args: &SynthArgs, g: &GlobalArgs) -> CmdResult<SynthesisProblem> {
    let path = PathBuf::from(&args.target);
    let mut problem = if path.is_file() {
        SynthesisProblem::from_json(&read_file(&path)?)?
    } else {
        let t: NamedTarget = args.target.parse()?;
        let (na, nv) = t.default_ancillas();
        SynthesisProblem::named_with(t, args.na.unwrap_or(na), args.nv.unwrap_or(nv))?
    };
    if path.is_file() && (args.na.is_some() || args.nv.is_some()) {
        let mut p = problem.clone();
        p.ancilla_photons = args.na.unwrap_or(p.ancilla_photons);
        p.vacuum_modes = args.nv.unwrap_or(p.vacuum_modes);
        p.validate()?;
        problem = p;
    }
    if let Some(r) = args.restarts {
        problem.restarts = r;
    }
    if let Some(s) = g.seed {
        problem.seed = s;
    }
    Ok(problem)
}

pub fn synth(args: &SynthArgs, g: &GlobalArgs) -> CmdResult<Outcome> {
    let problem = load_problem(args, g)?;
    let result = synthesize(&problem)?;
    let rows = result
        .restarts
        .iter()
        .map(|r| {
            vec![
                r.index.to_string(),
                r.converged.to_string(),
                r.fidelity.to_string(),
                r.probability.to_string(),
                r.constraint.to_string(),
            ]
        })
        .collect();
    let status = match result.status {
        SynthesisStatus::Verified => None,
        SynthesisStatus::Unverified => Some(Failure::new(
            ExitClass::Verification,
            "best candidate failed Fock-space verification",
        )),
        SynthesisStatus::NotConverged => Some(Failure::new(
            ExitClass::Convergence,
            "no restart reached the fidelity threshold",
        )),
    };
    let doc = Document::new("synth", &Config { seed: problem.seed, args }, &result)?
        .with_table(&["restart", "converged", "fidelity", "probability", "constraint"], rows);
    Ok((doc, status))
}

// ---- mbqc ----

#[derive(Args, Debug, Serialize)]
pub struct MbqcArgs {
    /// JSON with `graph` and `pattern`.
    #[arg(long)]
    pub pattern: PathBuf,
    /// JSON with `amplitudes`, one `[re, im]` pair per basis state of the
    /// input wires.
    #[arg(long)]
    pub inputs: PathBuf,
    /// Force outcomes instead of sampling, e.g. `0,2,1`.
    #[arg(long, value_delimiter = ',')]
    pub outcomes: Option<Vec<usize>>,
}

#[derive(Deserialize, Serialize)]
pub struct PatternFile {
    pub graph: ClusterGraph,
    pub pattern: MeasurementPattern,
}

#[derive(Deserialize, Serialize)]
pub struct InputsFile {
    pub amplitudes: Vec<[f64; 2]>,
}

pub fn mbqc(args: &MbqcArgs, g: &GlobalArgs) -> CmdResult<Outcome> {
    let seed = g.seed.unwrap_or(0);
    let pf: PatternFile = serde_json::from_str(&read_file(&args.pattern)?)
        .map_err(|e| parse_failure(format!("{}: {e}", args.pattern.display())))?;
    pf.graph.validate()?;
    let inputs: InputsFile = serde_json::from_str(&read_file(&args.inputs)?)
        .map_err(|e| parse_failure(format!("{}: {e}", args.inputs.display())))?;
    let amps = CVector::from_iterator(
        inputs.amplitudes.len(),
        inputs.amplitudes.iter().map(|p| Complex64::new(p[0], p[1])),
    );
    let norm = amps.norm();
    if (norm - 1.0).abs() > 1e-8 {
        return Err(parse_failure(format!("input state has norm {norm}, expected 1")));
    }
    let state = QuditState::new(pf.graph.d, pf.graph.inputs(), amps)?;
    let run = match &args.outcomes {
        Some(o) => run_pattern_with_outcomes(&pf.graph, &pf.pattern, &state, o)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_pattern(&pf.graph, &pf.pattern, &state, &mut rng)?
        }
    };
    let rows = run
        .transcript
        .iter()
        .map(|r| {
            vec![
                pf.graph.label(r.node),
                r.outcome.to_string(),
                r.probability.to_string(),
                r.frame.a.to_string(),
                r.frame.b.to_string(),
            ]
        })
        .collect();
    let doc = Document::new("mbqc", &Config { seed, args }, &run)?
        .with_table(&["node", "outcome", "probability", "frame_a", "frame_b"], rows);
    Ok((doc, None))
}

// ---- qaoa ----

#[derive(Args, Debug, Serialize)]
pub struct QaoaArgs {
    /// Edge list (`u v` per line) or JSON graph.
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "qudit")]
    pub formulation: String,
    /// Layers.
    #[arg(long, default_value_t = 1)]
    pub p: usize,
    /// Objective evaluations per restart.
    #[arg(long, default_value_t = 500)]
    pub budget: usize,
    /// Qudit mixer range `r`.
    #[arg(long, default_value_t = 1)]
    pub mixer_range: usize,
    /// One-hot penalty weight `C`.
    #[arg(long, default_value_t = 1.0)]
    pub penalty: f64,
    /// Monochromatic-edge weight `D`.
    #[arg(long, default_value_t = 1.0)]
    pub conflict: f64,
    /// Independent restarts; restart `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    pub restarts: usize,
    /// Also run the qudit cost layer as a cluster pattern (at most 3 vertices).
    #[arg(long)]
    pub cluster_check: bool,
}

#[derive(Serialize)]
struct QaoaDoc {
    vertices: usize,
    edges: usize,
    penalty_dominates: bool,
    ground_energy: f64,
    ground_states: usize,
    proper_ground_states: usize,
    layer_gate_count: Option<usize>,
    layer_max_deviation: Option<f64>,
    cluster_max_deviation: Option<f64>,
    best_restart: usize,
    restarts: Vec<QaoaReport>,
}

pub fn qaoa(args: &QaoaArgs, g: &GlobalArgs) -> CmdResult<Outcome> {
    let seed = g.seed.unwrap_or(0);
    let graph = Graph::parse(&read_file(&args.graph)?)?;
    let inst = ColoringInstance::with_weights(graph, args.k, args.penalty, args.conflict)?;
    let formulation: Formulation = args.formulation.parse()?;
    if args.restarts == 0 {
        return Err(parse_failure("at least one restart is needed"));
    }
    if formulation == Formulation::Qubit && !inst.penalty_dominates() {
        log::warn!(
            "penalty C = {} does not exceed D·maxdeg = {}; low-energy states may not be colorings",
            inst.penalty,
            inst.conflict * inst.graph.max_degree() as f64
        );
    }
    let q = Qaoa::new(&inst, formulation, args.mixer_range)?;
    let (ground_states, proper_ground_states) = q.proper_ground_states(1e-9);
    let reports: Vec<QaoaReport> = (0..args.restarts as u64)
        .into_par_iter()
        .map(|i| {
            let cfg = QaoaConfig {
                formulation,
                p: args.p,
                budget: args.budget,
                seed: seed.wrapping_add(i),
                mixer_range: args.mixer_range,
            };
            run_qaoa(&inst, &cfg)
        })
        .collect::<Result<_, _>>()?;
    let best_restart = (0..reports.len())
        .min_by(|&a, &b| reports[a].energy.total_cmp(&reports[b].energy))
        .unwrap_or(0);
    let angle = reports[best_restart].beta.first().copied().unwrap_or(0.0);
    let layer = match formulation {
        Formulation::Qubit if inst.k * inst.vertex_count() <= QUBIT_LAYER_CAP => {
            Some(qubit_layer_unitary(angle, &inst)?)
        }
        Formulation::Qubit => None,
        Formulation::Qudit => Some(qudit_layer_unitary(angle, &inst)?),
    };
    let cluster_max_deviation = if args.cluster_check {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Some(verify_cost_layer_pattern(&inst, angle, 3, &mut rng)?)
    } else {
        None
    };
    let rows = reports
        .iter()
        .map(|r| {
            vec![
                r.config.seed.to_string(),
                r.initial_energy.to_string(),
                r.energy.to_string(),
                r.success_probability.to_string(),
                r.baseline_probability.to_string(),
            ]
        })
        .collect();
    let result = QaoaDoc {
        vertices: inst.vertex_count(),
        edges: inst.edges().len(),
        penalty_dominates: inst.penalty_dominates(),
        ground_energy: q.cost().ground_energy(),
        ground_states,
        proper_ground_states,
        layer_gate_count: layer.as_ref().map(|l| l.gate_count),
        layer_max_deviation: layer.as_ref().map(|l| l.max_deviation),
        cluster_max_deviation,
        best_restart,
        restarts: reports,
    };
    let doc = Document::new("qaoa", &Config { seed, args }, &result)?.with_table(
        &["seed", "initial_energy", "energy", "success_probability", "baseline_probability"],
        rows,
    );
    Ok((doc, None))
}

// ---- resources ----

#[derive(Args, Debug, Serialize)]
pub struct ResourcesArgs {
    /// Estimate a single graph file.
    #[arg(long, conflicts_with_all = ["er", "config"])]
    pub graph: Option<PathBuf>,
    /// Erdős–Rényi sweep `V,p1,p2,...`.
    #[arg(long, value_delimiter = ',', conflicts_with = "config")]
    pub er: Option<Vec<f64>>,
    /// Sweep configuration JSON (`vertices`, `k`, `probabilities`, `samples`, `seed`).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Graphs per edge probability.
    #[arg(long)]
    pub samples: Option<usize>,
}

fn ratio_cell(r: Option<f64>) -> String {
    r.map_or_else(|| "undefined".to_string(), |x| x.to_string())
}

pub fn resources(args: &ResourcesArgs, g: &GlobalArgs) -> CmdResult<Outcome> {
    let header = ["edges", "c2", "cd", "ratio"];
    if let Some(path) = &args.graph {
        let k = args.k.ok_or_else(|| parse_failure("--k is required with --graph"))?;
        let graph = Graph::parse(&read_file(path)?)?;
        let est = resource_estimate(&graph, k)?;
        let row = vec![
            est.edges.to_string(),
            est.qubit_cluster.to_string(),
            est.qudit_cluster.to_string(),
            ratio_cell(est.ratio),
        ];
        let seed = g.seed.unwrap_or(0);
        let doc = Document::new("resources", &Config { seed, args }, &est)?
            .with_table(&header, vec![row])
            .csv_by_default();
        return Ok((doc, None));
    }
    let mut cfg = match (&args.config, &args.er) {
        (Some(path), _) => serde_json::from_str::<SweepConfig>(&read_file(path)?)
            .map_err(|e| parse_failure(format!("{}: {e}", path.display())))?,
        (None, Some(list)) => {
            let (&v, ps) = list
                .split_first()
                .ok_or_else(|| parse_failure("--er needs `V,p1,...`"))?;
            if v < 0.0 || v.fract() != 0.0 {
                return Err(parse_failure(format!("vertex count {v} is not a whole number")));
            }
            SweepConfig {
                vertices: v as usize,
                k: args.k.ok_or_else(|| parse_failure("--k is required with --er"))?,
                probabilities: ps.to_vec(),
                samples: 1,
                seed: 0,
            }
        }
        (None, None) => return Err(parse_failure("give --graph, --er or --config")),
    };
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    let rows: Vec<SweepRow> = er_graph_sweep(&cfg)?;
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.edges.to_string(),
                r.c2.to_string(),
                r.cd.to_string(),
                ratio_cell(r.ratio),
            ]
        })
        .collect();
    let doc = Document::new("resources", &cfg, &rows)?
        .with_table(&header, table)
        .csv_by_default();
    Ok((doc, None))
}
