pub mod callgraph;
pub mod effects;
pub mod ingest;
pub mod java;
pub mod testmodel;
pub mod focal;
pub mod usagegraph;
pub mod synthesis;
pub mod pipeline;
pub mod cli;
