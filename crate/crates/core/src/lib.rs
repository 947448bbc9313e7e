pub mod dist;
pub mod enumerate;
pub mod error;
pub mod harness;
pub mod indices;
pub mod instance;
pub mod comb;
pub mod mc;
pub mod oracle;
pub mod real;
pub mod single;
