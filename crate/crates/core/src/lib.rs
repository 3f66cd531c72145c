//! Arabic educational crossword generation.
//!
//! The crate covers the whole path from source material to a printable
//! puzzle:
//!
//! * [`arabic`] normalizes text and turns answers into grid letters.
//! * [`dataset`] loads, cleans, and summarizes clue-answer corpora.
//! * [`gateway`] talks to chat-completion models, live or from a recorded
//!   transcript.
//! * [`pipeline`] extracts clue-answer pairs from a text, or writes clues for
//!   given answers, and filters them.
//! * [`schema`] lays accepted answers out on a grid.
//! * [`render`] numbers clues and exports text, SVG, and puzzle JSON.
//! * [`service`] exposes all of the above over HTTP with per-session storage.
//!
//! Runnable walkthroughs live in `examples/`.

pub mod arabic;
pub mod dataset;
pub mod gateway;
pub mod pipeline;
pub mod render;
pub mod schema;
pub mod service;
