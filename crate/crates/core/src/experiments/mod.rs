pub mod concentration;
pub mod hankel;
pub mod sinc;
