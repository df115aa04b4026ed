//! Compiler core for SKILL.md agent skills: parse, lower to IR, run the
//! security passes and emit platform-native documents.

pub mod diagnostics;
pub mod emitters;
pub mod frontend;
pub mod ir;
pub mod metrics;
pub mod optimizer;
pub mod pipeline;
