//! Parallel evaluation over dataset items with a bounded number of worker threads.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use irsa_core::backend::Backend;
use irsa_core::eval::{evaluate_item, fingerprint, method_label, EvalError, ItemRecord, Metrics};
use irsa_core::model::{ProblemInstance, RunConfig};
use irsa_core::prompt::PromptSpec;
use irsa_core::runtime::{check_mode, Mode, RunResult};

type Slot = (ItemRecord, Option<RunResult>);

/// Like `evaluate_run`, with up to `jobs` items in flight. Records and runs come back in
/// dataset order whatever the scheduling.
pub fn evaluate_parallel<B: Backend + ?Sized>(
    backend: &B,
    spec: &PromptSpec,
    dataset: &[ProblemInstance],
    cfg: &RunConfig,
    mode: Mode,
    jobs: usize,
) -> Result<(Metrics, Vec<Option<RunResult>>), EvalError> {
    check_mode(spec, mode).map_err(EvalError::Mode)?;
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Option<Slot>>> = dataset.iter().map(|_| Mutex::new(None)).collect();
    let workers = jobs.clamp(1, dataset.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = dataset.get(k) else { break };
                let out = evaluate_item(backend, spec, item, cfg, mode);
                *slots[k].lock().expect("slot lock") = Some(out);
            });
        }
    });
    let (records, runs): (Vec<ItemRecord>, Vec<Option<RunResult>>) =
        slots.into_iter().map(|m| m.into_inner().expect("slot lock").expect("every item evaluated")).unzip();
    let metrics = Metrics::from_items(method_label(spec, mode), records, fingerprint(spec, cfg, mode));
    Ok((metrics, runs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use irsa_core::backend::CorruptMock;
    use irsa_core::dataset::{generate_dataset, DatasetParams};
    use irsa_core::eval::evaluate_run;
    use irsa_core::model::TaskKind;
    use irsa_core::prompt::{build_single_path_prompt, default_exemplar};
    use irsa_core::trace::TraceStyle;

    #[test]
    fn parallel_equals_serial() {
        let data = generate_dataset(&DatasetParams::new(TaskKind::LongestSubstring, 12, 3)).unwrap();
        let spec =
            build_single_path_prompt(TaskKind::LongestSubstring, &default_exemplar(TraceStyle::Lss), TraceStyle::Lss)
                .unwrap();
        let cfg = RunConfig::default();
        let backend = CorruptMock::new(0.3, 0);
        let serial = evaluate_run(&backend, &spec, &data, &cfg, Mode::Skip).unwrap();
        let (parallel, runs) = evaluate_parallel(&backend, &spec, &data, &cfg, Mode::Skip, 4).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(runs.len(), data.len());
    }
}
