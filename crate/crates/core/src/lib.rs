//! On-the-fly model checking of ATL+ over concurrent game models.
//!
//! The checker in [`engine`] builds a proof for an assertion `s |- f` while
//! querying the model lazily through [`cgm::ModelProvider`]. The [`oracle`]
//! module is an independent global evaluator used to cross-check verdicts.

pub mod cgm;
pub mod cli;
pub mod cnf;
pub mod crosscheck;
pub mod decomposition;
pub mod engine;
pub mod formula;
pub mod oracle;
