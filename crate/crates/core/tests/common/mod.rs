//! Independent references shared by the integration tests.

pub mod split_step;
