//! Warped-linear models for time series classification.
//!
//! The crate implements two time-warp invariant analogues of linear models —
//! warped-product functions (a weight sequence scored against a series along
//! the best warping path) and elastic-product functions (a weight matrix
//! scored against a series along the best warping path) — together with
//! their max-linear equivalents, constructive conversions between the
//! representations, stochastic subgradient training with ADAM, polyhedral
//! separability oracles, and an evaluation harness (dataset ingestion,
//! synthetic generators, cross-validation, and comparison metrics).

pub mod classifiers;
pub mod data;
pub mod error;
pub mod eval;
pub mod learning;
pub mod maxlinear;
pub mod model_io;
pub mod products;
pub mod selfcheck;
pub mod separability;
pub mod warping;

pub use error::{Error, Result};

#[cfg(test)]
mod thread_safety {
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn shared_types_cross_threads() {
        assert_send_sync::<crate::warping::WarpingPath>();
        assert_send_sync::<crate::warping::PathConstraint>();
        assert_send_sync::<crate::products::TimeSeries>();
        assert_send_sync::<crate::products::WeightMatrix>();
        assert_send_sync::<crate::maxlinear::MaxLinearModel>();
        assert_send_sync::<crate::classifiers::Classifier>();
        assert_send_sync::<crate::data::Dataset>();
    }
}
