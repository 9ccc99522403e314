pub mod driver;
pub mod error;
pub mod field;
pub mod io;
pub mod lift444;
pub mod lm6;
pub mod matrix;
pub mod poly;
pub mod report;
pub mod rng;
pub mod sample;
pub mod strassen;
pub mod sym9;
pub mod tensor;
