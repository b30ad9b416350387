//! Parallel replication dispatch. Outputs are collected in replication
//! order, so the summarized report is identical whatever the thread count.

use anyhow::{Context, Result};
use modsel_core::simulate::{collect_serial, RepKernel};
use rayon::prelude::*;

/// Runs all replications of a plan. `threads = 0` uses the rayon default;
/// `threads = 1` stays on the calling thread.
pub fn collect<K: RepKernel>(plan: &K, threads: usize) -> Result<Vec<K::Out>> {
    if threads == 1 {
        return Ok(collect_serial(plan));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .context("cannot build thread pool")?;
    Ok(pool.install(|| (0..plan.reps()).into_par_iter().map(|r| plan.kernel(r)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    struct SquarePlan {
        reps: u64,
    }

    impl RepKernel for SquarePlan {
        type Out = u64;
        fn reps(&self) -> u64 {
            self.reps
        }
        fn kernel(&self, rep: u64) -> u64 {
            rep * rep
        }
    }

    #[test]
    fn parallel_collection_preserves_order() {
        let plan = SquarePlan { reps: 1000 };
        let serial = collect(&plan, 1).unwrap();
        let parallel = collect(&plan, 4).unwrap();
        assert_eq!(serial, parallel);
        assert_eq!(serial[10], 100);
    }
}
