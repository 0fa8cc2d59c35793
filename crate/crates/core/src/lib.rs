pub mod decomposition;
pub mod diagnostics;
pub mod error;
pub mod exterior;
pub mod freefield;
pub mod model;
pub mod nonlinearity;
pub mod runner;
pub mod tolerances;
pub mod verify;
pub mod weights;
