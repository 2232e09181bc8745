pub mod clueminer;
pub mod config;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod graph;
pub mod ingest;
pub mod matcher;
pub mod mlp;
pub mod model;
pub mod provenance;
pub mod svm;
pub mod synth;
