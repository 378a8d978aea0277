//! Experiment harness around `dwrosn-core`: config files, edge-list and
//! table output formats, and the pipeline that turns a scenario config into
//! a bundle of metrics tables.

pub mod config;
pub mod edgelist;
pub mod experiment;
pub mod output;
