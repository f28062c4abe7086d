//! Tactical fleet assignment and crew pairing with crew flight time
//! allocation across fleet families.

pub mod analysis;
pub mod benders;
pub mod colgen;
pub mod extensions;
pub mod instance;
pub mod models;
pub mod pairing;
pub mod solver;
pub mod timespace;
