pub mod idempotent;
pub mod halmos;
pub use halmos::*;
pub use idempotent::*;
