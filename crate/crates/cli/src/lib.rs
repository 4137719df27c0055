//! Command line and HTTP front ends over [`emordle_core::engine::Engine`].

pub mod commands;
pub mod request;
pub mod service;
