//! Experiment drivers shared by the command-line tool and the acceptance
//! suite. Every experiment is a pure function of its configuration and
//! seed: trial `t` derives its own randomness from the master seed, so
//! runs replay bit-for-bit and trials can execute in parallel while rows
//! stay in trial order.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agm::{agm_params, VertexSketchBank};
use crate::distributed::{referee_bank, simulate, vertex_message, Message, VertexView};
use crate::error::{Error, Result};
use crate::graph::{verify_forest, ExactGraph, StreamOp};
use crate::lab::{
    embed_ur_in_dsk, encode, decode, nfold_reduction, recover_embedded, sample_d_ur, ur_params,
    AlwaysFailProtocol, AlwaysWrongProtocol, SketchUrProtocol, UrParams, UrProtocol,
};
use crate::prf::{tag, Seed256};

/// Default relation-ladder settings per experiment; the asymptotic
/// constants degenerate at these sizes, so each experiment pins a healthy
/// overridden ladder.
pub mod lab_defaults {
    /// encode/decode: universe 256, m = 64, eight ladder stages.
    pub const ENCDEC: (u64, f64, f64, f64) = (256, 1.52587890625e-05, 4.0, 2.0); // delta 2^-16
    /// n-fold: universe 32, m = 16, three ladder stages.
    pub const NFOLD: (u64, f64, f64, f64) = (32, 0.00390625, 4.0, 2.0); // delta 2^-8
    /// embedding: universe 8, m = 5, two ladder stages.
    pub const EMBED: (u64, f64, f64, f64) = (8, 0.0625, 2.0, 1.0); // delta 2^-4
    /// planted-graph sampling: universe 4, m = 4, two ladder stages.
    pub const DSK: (u64, f64, f64, f64) = (4, 0.0625, 3.0, 1.0); // delta 2^-4
}

pub fn ur_params_from_tuple(t: (u64, f64, f64, f64)) -> Result<UrParams> {
    ur_params(t.0, t.1, t.2, t.3)
}

fn trial_seed(master: u64, trial: u64) -> Seed256 {
    Seed256::from_u64(master).derive(tag::TRIAL, trial)
}

fn trial_rng(master: u64, trial: u64, lane: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(trial_seed(master, trial).derive(tag::PROTO, lane).to_bytes())
}

/// Erdos-Renyi-style graph with the given edge probability.
pub fn random_graph(n: u64, edge_prob: f64, rng: &mut ChaCha8Rng) -> ExactGraph {
    let mut g = ExactGraph::new(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < edge_prob {
                g.insert(u, v).expect("fresh edge");
            }
        }
    }
    g
}

/// A random insert/delete churn: each step inserts a uniformly random
/// absent pair or (with the given probability) deletes a present edge.
pub fn random_dynamic_ops(n: u64, steps: usize, delete_prob: f64, rng: &mut ChaCha8Rng) -> Vec<StreamOp> {
    let mut present = ExactGraph::new(n);
    let mut ops = Vec::with_capacity(steps);
    for _ in 0..steps {
        let delete = present.edge_count() > 0 && rng.gen::<f64>() < delete_prob;
        if delete {
            let pick = rng.gen_range(0..present.edge_count());
            let (u, v) = present.edges().nth(pick).expect("index in range");
            present.delete(u, v).expect("edge present");
            ops.push(StreamOp::Delete(u, v));
        } else {
            // rejection-sample an absent pair
            for _ in 0..64 {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u != v && !present.contains(u, v) {
                    present.insert(u, v).expect("absent edge");
                    ops.push(StreamOp::Insert(u, v));
                    break;
                }
            }
        }
    }
    ops
}

/// One dynamic-stream trial: random churn, one final query, verified
/// against the exact oracle.
pub fn failure_trial(n: u64, delta: f64, master_seed: u64, trial: u64) -> Result<bool> {
    let params = agm_params(n, delta)?;
    let mut rng = trial_rng(master_seed, trial, 0);
    let mut bank = VertexSketchBank::init(params, trial_seed(master_seed, trial));
    let mut g = ExactGraph::new(n);
    for op in random_dynamic_ops(n, 2 * n as usize, 0.3, &mut rng) {
        match op {
            StreamOp::Insert(u, v) => {
                g.insert(u, v)?;
                bank.update(u, v, 1)?;
            }
            StreamOp::Delete(u, v) => {
                g.delete(u, v)?;
                bank.update(u, v, -1)?;
            }
            StreamOp::Query => {}
        }
    }
    let forest = bank.query();
    Ok(verify_forest(&forest, &g).is_valid)
}

/// Dynamic-forest failure experiment: `trials` independent streams.
pub fn failure_experiment(
    n: u64,
    delta: f64,
    trials: u64,
    master_seed: u64,
) -> Result<(Vec<bool>, f64)> {
    let rows: Result<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map(|t| failure_trial(n, delta, master_seed, t))
        .collect();
    let rows = rows?;
    let failures = rows.iter().filter(|&&ok| !ok).count();
    Ok((rows, failures as f64 / trials as f64))
}

/// One space/message measurement at a given `(n, delta)`.
#[derive(Clone, Debug)]
pub struct ScalingRow {
    pub n: u64,
    pub delta: f64,
    pub total_bits: u64,
    pub avg_msg_bits: f64,
    pub max_msg_bits: u64,
}

/// Measures the bank size and one actual vertex message (sizes are
/// data-independent, so an isolated vertex suffices).
pub fn scaling_row(n: u64, delta: f64, master_seed: u64) -> Result<ScalingRow> {
    let params = agm_params(n, delta)?;
    let shared = trial_seed(master_seed, n);
    let bank = VertexSketchBank::init(params, shared);
    let total_bits = bank.total_size_bits();
    let msg = vertex_message(&VertexView::new(0, Vec::new(), n)?, &params, &shared)?;
    Ok(ScalingRow {
        n,
        delta,
        total_bits,
        avg_msg_bits: msg.bit_length as f64,
        max_msg_bits: msg.bit_length,
    })
}

/// Outcome of one distributed-fidelity trial.
#[derive(Clone, Debug)]
pub struct FidelityOutcome {
    pub banks_byte_identical: bool,
    pub forests_equal: bool,
    pub accounting_exact: bool,
}

/// Builds the same random graph centrally and through per-vertex messages,
/// then compares the referee's bank and forest with the centralized ones.
pub fn fidelity_trial(n: u64, delta: f64, master_seed: u64, trial: u64) -> Result<FidelityOutcome> {
    let mut rng = trial_rng(master_seed, trial, 0);
    let g = random_graph(n, rng.gen_range(0.05..0.4), &mut rng);
    let params = agm_params(n, delta)?;
    let shared = trial_seed(master_seed, trial);

    let mut central = VertexSketchBank::init(params, shared);
    for (u, v) in g.edges() {
        central.update(u, v, 1)?;
    }
    let messages: Result<Vec<Message>> = g
        .adjacency()
        .into_iter()
        .enumerate()
        .map(|(u, nb)| vertex_message(&VertexView::new(u as u64, nb, n)?, &params, &shared))
        .collect();
    let messages = messages?;
    let bank = referee_bank(&messages, params, shared)?;

    let total_message_bits: u64 = messages.iter().map(|m| m.bit_length).sum();
    Ok(FidelityOutcome {
        banks_byte_identical: bank.payload_bytes() == central.payload_bytes(),
        forests_equal: bank.query() == central.query(),
        accounting_exact: total_message_bits == bank.total_size_bits(),
    })
}

/// One n-fold reduction trial over freshly sampled instances.
pub fn nfold_trial(
    n: u64,
    delta: f64,
    ur: &UrParams,
    master_seed: u64,
    trial: u64,
) -> Result<crate::lab::NfoldOutcome> {
    if ur.universe != n {
        return Err(Error::InvalidParameter(format!(
            "instances must live over [0, {n}), but the ladder universe is {}",
            ur.universe
        )));
    }
    let mut rng = trial_rng(master_seed, trial, 0);
    let instances: Vec<_> = (0..n).map(|_| sample_d_ur(ur, &mut rng)).collect();
    nfold_reduction(&instances, delta, trial_seed(master_seed, trial))
}

/// Per-trial n-fold outcome: (forest valid, all answers correct, bytes
/// communicated).
pub type NfoldRow = (bool, bool, usize);

/// n-fold experiment summary: per-trial outcomes plus the all-correct rate.
pub fn nfold_experiment(
    n: u64,
    delta: f64,
    ur: &UrParams,
    trials: u64,
    master_seed: u64,
) -> Result<(Vec<NfoldRow>, f64)> {
    let rows: Result<Vec<NfoldRow>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let out = nfold_trial(n, delta, ur, master_seed, t)?;
            Ok((out.forest_valid, out.all_correct, out.communicated_bytes))
        })
        .collect();
    let rows = rows?;
    let correct = rows.iter().filter(|r| r.1).count();
    Ok((rows, correct as f64 / trials as f64))
}

/// Outcome of one embedding trial.
#[derive(Clone, Debug)]
pub struct EmbedOutcome {
    pub forest_valid: bool,
    pub recovered: Option<u64>,
    pub recovered_in_difference: bool,
}

/// Samples a relation instance, embeds it at a random hub of the planted
/// family on `side^5`, runs the full distributed simulation, and reads the
/// answer back through the injection.
pub fn embed_trial(
    side: u64,
    delta: f64,
    ur: &UrParams,
    master_seed: u64,
    trial: u64,
) -> Result<EmbedOutcome> {
    let mut rng = trial_rng(master_seed, trial, 0);
    let inst = sample_d_ur(ur, &mut rng);
    let emb = embed_ur_in_dsk(&inst.s, &inst.t, side.pow(5), ur, &mut rng)?;
    let report = simulate(&emb.graph, delta, trial_seed(master_seed, trial))?;
    let recovered = recover_embedded(&emb, &report.forest);
    let difference = inst.s_minus_t();
    let recovered_in_difference = recovered.map(|x| difference.contains(&x)).unwrap_or(false);
    Ok(EmbedOutcome { forest_valid: report.valid, recovered, recovered_in_difference })
}

pub fn embed_experiment(
    side: u64,
    delta: f64,
    ur: &UrParams,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<EmbedOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|t| embed_trial(side, delta, ur, master_seed, t))
        .collect()
}

/// Which protocol an encode/decode trial exercises.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodecProtocol {
    AlwaysFail,
    AlwaysWrong,
    Sketch,
}

impl CodecProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            CodecProtocol::AlwaysFail => "always_fail",
            CodecProtocol::AlwaysWrong => "always_wrong",
            CodecProtocol::Sketch => "sketch",
        }
    }
}

/// Outcome of one encode/decode round-trip.
#[derive(Clone, Debug)]
pub struct CodecOutcome {
    pub roundtrip_ok: bool,
    pub stage0: usize,
    pub accepted: usize,
    pub stages: usize,
}

pub fn encdec_trial(
    p: &UrParams,
    which: CodecProtocol,
    master_seed: u64,
    trial: u64,
) -> Result<CodecOutcome> {
    let mut rng = trial_rng(master_seed, trial, 0);
    let inst = sample_d_ur(p, &mut rng);
    let shared = Seed256::from_u64(master_seed).derive(tag::PERM, 1);
    let private = trial_seed(master_seed, trial);
    let proto: Box<dyn UrProtocol> = match which {
        CodecProtocol::AlwaysFail => Box::new(AlwaysFailProtocol),
        CodecProtocol::AlwaysWrong => Box::new(AlwaysWrongProtocol { universe: p.universe }),
        CodecProtocol::Sketch => Box::new(SketchUrProtocol::new(
            p.universe,
            0.125,
            0.001,
            private.derive(tag::PROTO, 7),
        )),
    };
    let rec = encode(&inst.s, p, proto.as_ref(), &shared, &private)?;
    let decoded = decode(&rec, p, proto.as_ref(), &shared)?;
    let stage0 = p
        .schedule
        .iter()
        .position(|&r| r as usize == rec.t0.len())
        .expect("encoder used a ladder size");
    Ok(CodecOutcome {
        roundtrip_ok: decoded == inst.s,
        stage0,
        accepted: rec.accepted(),
        stages: p.stages(),
    })
}

pub fn encdec_experiment(
    p: &UrParams,
    which: CodecProtocol,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<CodecOutcome>> {
    (0..trials)
        .into_par_iter()
        .map(|t| encdec_trial(p, which, master_seed, t))
        .collect()
}

/// Minimal CSV assembly: a header row plus stringified records.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dynamic_ops_respect_multiplicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ops = random_dynamic_ops(12, 60, 0.4, &mut rng);
        let mut g = ExactGraph::new(12);
        for op in ops {
            match op {
                StreamOp::Insert(u, v) => g.insert(u, v).unwrap(),
                StreamOp::Delete(u, v) => g.delete(u, v).unwrap(),
                StreamOp::Query => {}
            }
        }
    }

    #[test]
    fn failure_experiment_replays() {
        let (rows_a, rate_a) = failure_experiment(24, 0.1, 8, 7).unwrap();
        let (rows_b, rate_b) = failure_experiment(24, 0.1, 8, 7).unwrap();
        assert_eq!(rows_a, rows_b);
        assert_eq!(rate_a, rate_b);
    }

    #[test]
    fn scaling_row_accounting() {
        let row = scaling_row(64, 1.0 / 64.0, 3).unwrap();
        assert_eq!(row.avg_msg_bits * 64.0, row.total_bits as f64);
        assert_eq!(row.max_msg_bits * 64, row.total_bits);
    }

    #[test]
    fn encdec_trials_roundtrip_for_all_protocols() {
        let p = ur_params_from_tuple(lab_defaults::NFOLD).unwrap();
        for which in [CodecProtocol::AlwaysFail, CodecProtocol::AlwaysWrong, CodecProtocol::Sketch] {
            for t in 0..10 {
                let out = encdec_trial(&p, which, 11, t).unwrap();
                assert!(out.roundtrip_ok, "{:?} trial {t}", which);
            }
        }
    }

    #[test]
    fn lab_default_ladders_are_valid() {
        for t in [
            lab_defaults::ENCDEC,
            lab_defaults::NFOLD,
            lab_defaults::EMBED,
            lab_defaults::DSK,
        ] {
            let p = ur_params_from_tuple(t).unwrap();
            assert!(p.schedule.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn csv_assembly() {
        let text = to_csv(&["a", "b"], &[vec!["1".into(), "2".into()]]);
        assert_eq!(text, "a,b\n1,2\n");
    }
}
