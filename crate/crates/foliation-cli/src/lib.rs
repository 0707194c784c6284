//! Document plumbing for the command-line interface: the JSON document
//! schema, per-file command drivers, deterministic report rendering, and
//! the built-in document corpus.

pub mod commands;
pub mod corpus_docs;
pub mod doc;
pub mod report;
