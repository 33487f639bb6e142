pub mod error;
pub mod heun;
pub mod linalg;
pub mod quadrature;
pub mod wavefunction;
pub mod rdm;
pub mod entropy;
pub mod variational;
