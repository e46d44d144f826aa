pub mod error;
pub mod invariants;
pub mod pd;
pub mod poly;
pub mod tile;
pub mod trace;
pub mod layout;
pub mod exec;
pub mod identify;
pub mod analysis;
pub mod pipeline;
