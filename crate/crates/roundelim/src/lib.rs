pub mod api;
pub mod cli;
pub mod dot;
pub mod json;
pub mod ops;
pub mod verify;
