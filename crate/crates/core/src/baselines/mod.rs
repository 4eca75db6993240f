//! Comparison methods: uniform k-means teams and a genetic algorithm.

mod genetic;
mod kmeans;

pub use genetic::{evolve, genetic_algorithm, Chromosome, GaOutcome, GaParams};
pub use kmeans::{balanced_kmeans, uniform_kmeans, KMEANS_MAX_ITERS, KMEANS_TOLERANCE};
