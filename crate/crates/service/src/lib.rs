//! Batch CLI and HTTP service for group-based translation, with a log of
//! accepted translations for computer-assisted translation.

pub mod accept;
pub mod cli;
pub mod http;

pub use accept::{AcceptanceLog, AcceptanceRecord};
pub use http::{router, AppState};
