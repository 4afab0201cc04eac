//! Simulation and verification toolkit for quantum-channel tomography in
//! diamond distance.

pub mod applications;
pub mod channel;
pub mod error;
pub mod haar;
pub mod linalg;
pub mod sdp;
pub mod stats;
pub mod tomography;

pub use error::{Error, Result};
pub use linalg::{CMat, CVec, DensityOperator, DimPair, HermitianOperator, PureState};

pub use applications::{BinaryPovm, MultiPovm};
pub use channel::{ChoiOperator, Isometry, KrausChannel};
pub use sdp::{DiamondMethod, DiamondValue, SdpProblem, SdpSolution, SdpStatus};
pub use tomography::{BoundComponents, PureEstimate, TomographyConfig, TrialRecord};
