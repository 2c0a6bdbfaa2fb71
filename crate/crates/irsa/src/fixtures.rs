//! Generators for the replay stores shipped under `fixtures/`.
//!
//! The log-odds store is synthetic: [`PremiseModel`] scores `true` against `false` from the
//! number of true premises in the context with a little per-context noise, so that the
//! experiment has something to read offline. It stands in for no particular model.

use std::path::Path;

use anyhow::Result;
use irsa_core::backend::{Backend, BackendError, CompletionRequest, CompletionResult, ObedientMock};
use irsa_core::eval::logodds_experiment;
use irsa_core::model::{FinishReason, ProblemInstance, RunConfig, TaskInput, TopLogprobs};
use irsa_core::prompt::{append_problem, build_single_path_prompt, default_exemplar};
use irsa_core::runtime::run_plain;
use irsa_core::trace::TraceStyle;
use sha2::{Digest, Sha256};

use crate::store::Recorder;

pub const LOGODDS_SEED: u64 = 0;

/// Synthetic first-token distribution for `Because 2<1 is` after k true premises: the
/// log-odds of `true` grow by 0.8 per premise and are even at k = 7.
#[derive(Debug, Clone, Copy, Default)]
pub struct PremiseModel;

impl PremiseModel {
    fn noise(context: &str) -> f64 {
        let d = Sha256::digest(context.as_bytes());
        let x = u16::from_le_bytes([d[0], d[1]]) as f64 / u16::MAX as f64;
        (x - 0.5) * 1.6
    }
}

impl Backend for PremiseModel {
    fn complete(&self, req: &CompletionRequest) -> Result<CompletionResult, BackendError> {
        req.validate()?;
        if !req.context.ends_with("is") {
            return Err(BackendError::UnrecognizedContext("expected a comparison query".into()));
        }
        let k = req.context.lines().filter(|l| l.contains(" is true we")).count() as f64;
        let odds = 0.8 * (k - 7.0) + Self::noise(&req.context);
        let p_true = 0.92 / (1.0 + (-odds).exp());
        let p_false = 0.92 - p_true;
        let mut top = TopLogprobs::new();
        top.insert(" true".into(), (0.9 * p_true).ln());
        top.insert("true".into(), (0.1 * p_true).ln());
        top.insert(" false".into(), (0.9 * p_false).ln());
        top.insert(" not".into(), 0.05f64.ln());
        top.insert(" always".into(), 0.03f64.ln());
        let text = if p_true >= p_false { " true" } else { " false" };
        let logprobs = req.logprobs.map(|_| vec![top]);
        Ok(CompletionResult { text: text.into(), finish_reason: FinishReason::BudgetExhausted, logprobs })
    }
}

/// Records the full log-odds experiment (k = 1..=15, 20 trials) against [`PremiseModel`].
pub fn write_logodds_store(path: &Path) -> Result<()> {
    let _ = std::fs::remove_file(path);
    let rec = Recorder::open(PremiseModel, path)?;
    logodds_experiment(&rec, 15, 20, LOGODDS_SEED)?;
    Ok(())
}

/// Records the obedient-mock completion of the first worked Bubble Sort example continued
/// on `0, 3, 8, 5, 6`.
pub fn write_bubble_store(path: &Path) -> Result<()> {
    let _ = std::fs::remove_file(path);
    let rec = Recorder::open(ObedientMock, path)?;
    bubble_run(&rec);
    Ok(())
}

/// The run recorded by [`write_bubble_store`].
pub fn bubble_run<B: Backend + ?Sized>(backend: &B) -> irsa_core::runtime::RunResult {
    let style = TraceStyle::BubbleV1;
    let spec = build_single_path_prompt(style.task(), &default_exemplar(style), style).expect("fixed prompt");
    let input = TaskInput::sequence([0, 3, 8, 5, 6]);
    let ctx = append_problem(&spec, &ProblemInstance::new("prompt2", input.clone(), None)).expect("fixed problem");
    run_plain(backend, &ctx, &spec, Some(&input), &RunConfig::default())
}
