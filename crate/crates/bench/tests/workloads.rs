use cmc1face::surface::{sample_grid, singular_curves};
use cmc1face_bench::{options, workloads};

#[test]
fn every_workload_runs_without_failed_nodes() {
    for w in workloads(12) {
        let grid = sample_grid(&w.data, &w.region, w.n, w.n, &options());
        assert_eq!(grid.samples.len(), 144, "{}", w.name);
        assert!(grid.failures.is_empty(), "{}: {:?}", w.name, grid.failures.first());
    }
}

#[test]
fn curve_workloads_find_their_curve() {
    for w in workloads(40).into_iter().filter(|w| w.name != "catenoid") {
        assert_eq!(singular_curves(&w.data, &w.region, w.n, &options()).len(), 1, "{}", w.name);
    }
}
