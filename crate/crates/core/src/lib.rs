pub mod linalg;
pub mod poly;
pub mod numfield;
pub mod algebra;
pub mod group;
pub mod qalg;
pub mod ore;
pub mod galois;
pub mod fep;
