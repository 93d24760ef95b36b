//! Fragment-based molecular tokenization.
//!
//! * [`molgraph`]: SMILES parsing, canonical ranks and canonical SMILES.
//! * [`fragmine`]: frequency-driven subgraph vocabulary mining and greedy
//!   vocabulary-guided decomposition.
//! * [`fingerprint`]: Morgan fingerprints, Tanimoto and cosine kernels.
//! * [`simspace`]: similarity matrices, encoding-bias correlation tables,
//!   embedding augmentation and weight drift.
//! * [`dataset`]: property quantization, prompt templates and dataset records.
//! * [`evalmetrics`]: generation and property-QA metrics.

pub mod dataset;
pub mod evalmetrics;
pub mod fingerprint;
pub mod fragmine;
pub mod molgraph;
pub mod simspace;
pub mod synth;
