use irsa_core::backend::{CorruptMock, ObedientMock};
use irsa_core::dataset::{generate_dataset, DatasetParams};
use irsa_core::eval::{ensemble_metrics, evaluate_run, render_report};
use irsa_core::model::{RunConfig, TaskKind};
use irsa_core::prompt::{
    build_baseline_prompt, build_fragment_prompt, build_single_path_prompt, default_exemplar, lcs_interpreter_prompt,
    BaselineStyle, PromptSpec,
};
use irsa_core::runtime::Mode;
use irsa_core::trace::TraceStyle;

fn single(style: TraceStyle) -> PromptSpec {
    build_single_path_prompt(style.task(), &default_exemplar(style), style).unwrap()
}

#[test]
fn obedient_mock_is_perfect_on_every_style() {
    for task in TaskKind::ALL {
        let data = generate_dataset(&DatasetParams::new(task, 8, 11)).unwrap();
        for style in TraceStyle::for_task(task) {
            let spec = single(style);
            let mut modes = vec![Mode::Plain];
            if style.supports_skip() {
                modes.push(Mode::Skip);
            }
            for mode in modes {
                let m = evaluate_run(&ObedientMock, &spec, &data, &RunConfig::default(), mode).unwrap();
                assert_eq!(m.n_correct, m.n, "{style} {mode}: {:?}", m.items.iter().find(|r| !r.correct));
            }
        }
    }
}

#[test]
fn interpreter_and_fragments_are_perfect() {
    let lcs = generate_dataset(&DatasetParams::new(TaskKind::Lcs, 8, 2)).unwrap();
    let spec = lcs_interpreter_prompt("A", "A").unwrap();
    for mode in [Mode::Plain, Mode::Skip] {
        assert_eq!(evaluate_run(&ObedientMock, &spec, &lcs, &RunConfig::default(), mode).unwrap().accuracy, 1.0);
    }
    let bubble = generate_dataset(&DatasetParams::new(TaskKind::BubbleSort, 8, 2)).unwrap();
    let spec = build_fragment_prompt(13, 0).unwrap();
    assert_eq!(evaluate_run(&ObedientMock, &spec, &bubble, &RunConfig::default(), Mode::Skip).unwrap().accuracy, 1.0);
}

#[test]
fn baselines_parse_mock_answers() {
    for task in TaskKind::ALL {
        let data = generate_dataset(&DatasetParams::new(task, 6, 4)).unwrap();
        for (style, k, code) in [
            (BaselineStyle::FewShot, 3, false),
            (BaselineStyle::FewShot, 2, true),
            (BaselineStyle::AskExecute, 0, false),
            (BaselineStyle::AskSteps, 0, true),
        ] {
            let spec = build_baseline_prompt(task, k, code, style, 0).unwrap();
            let m = evaluate_run(&ObedientMock, &spec, &data, &RunConfig::default(), Mode::Plain).unwrap();
            assert_eq!(m.accuracy, 1.0, "{task} {style:?}");
        }
    }
}

#[test]
fn corruption_costs_accuracy_and_fidelity() {
    let data = generate_dataset(&DatasetParams::new(TaskKind::BubbleSort, 20, 0)).unwrap();
    let spec = single(TraceStyle::BubbleV2);
    let m = evaluate_run(&CorruptMock::new(0.2, 0), &spec, &data, &RunConfig::default(), Mode::Skip).unwrap();
    assert!(m.accuracy < 1.0);
    assert!(m.items.iter().any(|r| r.fidelity.is_some_and(|f| f < 1.0)));
}

#[test]
fn report_rows() {
    let data = generate_dataset(&DatasetParams::new(TaskKind::BubbleSort, 10, 0)).unwrap();
    let runs: Vec<_> = [0, 1, 2]
        .iter()
        .map(|&s| {
            let spec = build_fragment_prompt(7, s).unwrap();
            evaluate_run(&CorruptMock::new(0.1, s), &spec, &data, &RunConfig::default(), Mode::Skip).unwrap()
        })
        .collect();
    let mut rows = runs.clone();
    rows.push(ensemble_metrics("ensemble", &runs));
    let table = render_report(&rows);
    assert_eq!(table.lines().count(), 5);
    assert!(table.lines().last().unwrap().starts_with("ensemble"));
}

#[test]
fn empty_bracket_sequence_runs_in_both_modes() {
    use irsa_core::model::{AnswerValue, ProblemInstance, TaskInput};
    use irsa_core::prompt::append_problem;
    use irsa_core::runtime::{run_plain, run_skip};
    let spec = single(TraceStyle::Paren);
    let input = TaskInput::brackets([]);
    let ctx = append_problem(&spec, &ProblemInstance::new("e", input.clone(), None)).unwrap();
    let cfg = RunConfig::default();
    assert_eq!(run_plain(&ObedientMock, &ctx, &spec, Some(&input), &cfg).answer, Some(AnswerValue::Validity(true)));
    assert_eq!(run_skip(&ObedientMock, &ctx, &spec, Some(&input), &cfg).answer, Some(AnswerValue::Validity(true)));
}
