pub mod gf;
pub mod group;
pub mod cayley;
pub mod classify;
pub mod forms;
pub mod linalg;
pub mod tgraph;
pub mod transvection;
pub mod word;
