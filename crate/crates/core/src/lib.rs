//! Core algorithms for cross-lingual instruction-data synthesis.
//!
//! This crate is the pure half of the pipeline: response sampling,
//! translation gating, code-switching, parallel-corpus instruction
//! templates, trigram language identification, and reference loss
//! arithmetic. Every operation is deterministic given a seed, and nothing
//! here touches the filesystem, network, or clock; the `distilforge` crate
//! layers IO, wire backends, and the CLI on top.
//!
//! `no_std` with `alloc` — the crate can be embedded anywhere a heap exists.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod assemble;
pub mod backend;
pub mod config;
pub mod dict;
pub mod lang;
pub mod lid;
pub mod loss;
pub mod record;
pub mod rng;
pub mod switch;
pub mod template;
pub mod transfer;

pub use config::RunConfig;
pub use lang::LanguageTag;
pub use record::{AnswerOrigin, InstructionRecord, TrainingExample, TransferSubsetKind};
