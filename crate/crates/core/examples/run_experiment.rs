//! Batch trials through the library API, as `hsp-sim run` does.

use heisenberg_hsp::experiment::{run_experiment, CaseFilter, ExperimentConfig};

fn main() -> heisenberg_hsp::Result<()> {
    for p in [3, 5, 7] {
        let config = ExperimentConfig { p, n: 2, case: CaseFilter::Any, trials: 200, seed: 1, ..Default::default() };
        let r = run_experiment(&config)?;
        println!(
            "p={p} n=2: {}/{} recovered, mean rounds {:.2} (accepted {:.2}), mean queries {:.2}",
            r.successes, r.trials, r.mean_rounds, r.mean_accepted_rounds, r.mean_queries
        );
        println!(
            "    discards per trial: one-dim {:.2}, k+l=0 {:.2}, non-square {:.2}",
            r.mean_discards_by_reason.one_dim, r.mean_discards_by_reason.sum_zero, r.mean_discards_by_reason.non_square
        );
    }
    Ok(())
}
