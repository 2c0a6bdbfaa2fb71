//! Fragmented Bubble Sort prompts: the opening of one trace, cut mid-sentence, followed by
//! isolated single transitions from other lists.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{trace_spec, PromptError, PromptKind, PromptSpec};
use crate::trace::bubble::{v2_step, BubbleState, TransitionType};
use crate::trace::TraceStyle;

const BLOCK_INDENT: &str = "        ";

/// Opening of the [2, 3, 1, 5] trace, up to and including `Since i=2 and`.
pub const FRAGMENT_PREFIX: &str = "Problem: 2, 3, 1, 5
EXECUTION
    Length of the list: L=4
    Number of pairs: P=3
    a=[2 3 1 5]
    set n_swaps=0. set i=P=3. set swap_flag=true.
        <state> a=[2 3 1 5] i=3 P=3 n_swaps=0 swap_flag=true </state>
        Since i=3 and P=3, these two are equal, so this iteration is done, but swap_flag is true,
        so we need another iteration
    Iteration:
        set swap_flag=false.  set i=0. The state is:
        <state> a=[2 3 1 5] i=0 P=3 n_swaps=0 swap_flag=false </state>
        Since i=0 and P=3, these two are different, so we continue
        a[i]=a[0]=2 a[i+1]=a[1]=3
        Because 2<3 is true we keep state as is and move on by increasing i
        <state> a=[2 3 1 5] i=1 P=3 n_swaps=0 swap_flag=false </state>
        Since i=1 and P=3, these two are different, so we continue
        a[i]=a[1]=3 a[i+1]=a[2]=1
        Because 3<1 is false we set swap_flag=true,increase n_swaps by one, and in a=[2 3 1 5] swap 3 and 1,
        and increase i, and keep P as is to get
        <state> a=[2 1 3 5] i=2 P=3 n_swaps=1 swap_flag=true </state>
        Since i=2 and";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fragment {
    pub transition: TransitionType,
    /// Starting block, narration, and the next block (or the epilogue for a stop).
    pub text: String,
}

fn distinct_digits(len: usize, rng: &mut impl Rng) -> Vec<i64> {
    let mut d: Vec<i64> = (0..10).collect();
    d.shuffle(rng);
    d.truncate(len);
    d
}

/// A state plausible mid-run that `classify`s as `kind`. Within a pass `a[i]` is the
/// largest of `a[0..=i]`; while swap_flag is false nothing has moved, so that prefix is
/// ascending; a true flag implies at least one swap so far.
fn sample_state(kind: TransitionType, rng: &mut impl Rng) -> BubbleState {
    use TransitionType::*;
    let flag = matches!(kind, EndIterAnother | CmpTrueFlagTrue | CmpFalseFlagTrue);
    let min_len = if matches!(kind, CmpTrueFlagTrue | CmpFalseFlagTrue) { 3 } else { 2 };
    let len = rng.random_range(min_len..=7);
    let p = len - 1;
    let mut a = distinct_digits(len, rng);
    let i = match kind {
        EndIterAnother | EndIterStop => p,
        // a true flag needs an earlier comparison in this pass
        CmpTrueFlagTrue | CmpFalseFlagTrue => rng.random_range(1..p),
        _ => rng.random_range(0..p),
    };
    match kind {
        EndIterStop => a.sort_unstable(),
        EndIterAnother => {
            let m = (0..len).max_by_key(|&k| a[k]).unwrap_or(0);
            a.swap(m, p);
        }
        _ => {
            let mut d = a[..=i + 1].to_vec();
            d.sort_unstable();
            let top = d.pop().unwrap_or_default();
            let (cur, next) = if matches!(kind, CmpFalseFlagFalse | CmpFalseFlagTrue) {
                (top, d.remove(rng.random_range(0..d.len())))
            } else {
                (d.pop().unwrap_or_default(), top)
            };
            if flag {
                // a swap already happened this pass, so the prefix need not be ordered
                d.shuffle(rng);
            }
            d.push(cur);
            d.push(next);
            a[..=i + 1].copy_from_slice(&d);
        }
    }
    let n_swaps = if flag { rng.random_range(1..=9) } else { rng.random_range(0..=9) };
    BubbleState { a, i: Some(i), p, n_swaps, swap_flag: flag }
}

fn block(s: &BubbleState) -> String {
    format!("{BLOCK_INDENT}{}\n", s.render())
}

fn fragment(kind: TransitionType, rng: &mut impl Rng) -> Fragment {
    let s = sample_state(kind, rng);
    debug_assert_eq!(TransitionType::classify(&s), Some(kind));
    let (narration, next, _) = v2_step(&s);
    let mut text = block(&s);
    text.push_str(&narration);
    if let Some(n) = next {
        text.push_str(&block(&n));
    }
    Fragment { transition: kind, text }
}

/// Transition fragments for a prompt of `n_fragments` (the prefix counts as one). Balanced
/// sets hold each transition type equally often; unbalanced ones draw types at random.
pub fn fragment_set(n_fragments: usize, seed: u64, balanced: bool) -> Result<Vec<Fragment>, PromptError> {
    if ![7, 13, 19, 25].contains(&n_fragments) {
        return Err(PromptError::UnsupportedCount(n_fragments));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = n_fragments - 1;
    let mut kinds: Vec<TransitionType> = if balanced {
        TransitionType::ALL.iter().copied().cycle().take(count).collect()
    } else {
        (0..count).map(|_| TransitionType::ALL[rng.random_range(0..6)]).collect()
    };
    kinds.shuffle(&mut rng);
    Ok(kinds.into_iter().map(|k| fragment(k, &mut rng)).collect())
}

pub fn build_fragment_prompt(n_fragments: usize, seed: u64) -> Result<PromptSpec, PromptError> {
    build_fragment_prompt_with(n_fragments, seed, true)
}

pub fn build_fragment_prompt_with(n_fragments: usize, seed: u64, balanced: bool) -> Result<PromptSpec, PromptError> {
    let frags = fragment_set(n_fragments, seed, balanced)?;
    let mut text = String::from(FRAGMENT_PREFIX);
    text.push_str("\n\n");
    for f in &frags {
        text.push_str(&f.text);
        text.push('\n');
    }
    Ok(trace_spec(text, TraceStyle::BubbleV2, PromptKind::Fragmented { n_fragments, seed, balanced }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TaskInput;
    use crate::trace::{problem_header, render_trace};

    #[test]
    fn prefix_is_the_rendered_opening() {
        let input = TaskInput::sequence([2, 3, 1, 5]);
        let full = problem_header(&input, TraceStyle::BubbleV2).unwrap()
            + &render_trace(&input, TraceStyle::BubbleV2).unwrap().0;
        assert!(full.starts_with(FRAGMENT_PREFIX));
        assert_eq!(&full[FRAGMENT_PREFIX.len()..FRAGMENT_PREFIX.len() + 5], " P=3,");
    }

    #[test]
    fn sampled_states_classify() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            for kind in TransitionType::ALL {
                let s = sample_state(kind, &mut rng);
                assert_eq!(TransitionType::classify(&s), Some(kind), "{s:?}");
                let i = s.i.unwrap();
                if !s.swap_flag {
                    assert!(s.a[..=i.min(s.p)].windows(2).all(|w| w[0] < w[1]), "{s:?}");
                } else {
                    assert!(s.n_swaps >= 1);
                }
                if i < s.p {
                    assert!(s.a[..i].iter().all(|v| *v < s.a[i]), "{s:?}");
                }
            }
        }
    }

    #[test]
    fn balanced_counts() {
        for n in [7, 13, 19, 25] {
            let frags = fragment_set(n, 0, true).unwrap();
            for kind in TransitionType::ALL {
                assert_eq!(frags.iter().filter(|f| f.transition == kind).count(), (n - 1) / 6);
            }
        }
        assert!(matches!(build_fragment_prompt(8, 0), Err(PromptError::UnsupportedCount(8))));
        assert_eq!(build_fragment_prompt(13, 4).unwrap(), build_fragment_prompt(13, 4).unwrap());
    }
}
