pub mod fields;
pub mod exterior;
pub mod structures;
pub mod curvature;
pub mod specialfns;
pub mod catalog;
pub mod pde;

/// Run every parallel loop on one thread. Call before any other work; fails if the
/// global pool was already initialized.
pub fn use_single_thread() -> Result<(), String> {
    rayon::ThreadPoolBuilder::new().num_threads(1).build_global().map_err(|e| e.to_string())
}
