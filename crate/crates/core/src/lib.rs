//! Rule-based translation over a bilingual lexicon of headed word groups.
//!
//! A sentence is tokenized and analyzed against a full-form table, rewritten
//! by morphosyntactic transformation rules, covered by lexicon groups chosen
//! through constraint satisfaction (a category slot of one group may be
//! filled by the head of another), transferred to target groups under
//! agreement constraints, and realized through a generation table.

pub mod features;
pub mod lexicon;
pub mod morpho;
pub mod pipeline;
pub mod solver;
pub mod xfer;

pub use features::{unify, FeatureMap};
pub use lexicon::{Lexicon, LexiconError};
pub use xfer::{translate, TranslateOptions, TranslationResult};
