//! Pose-conditioned neural occupancy models for articulated bodies, with a
//! procedural capsule-body oracle for ground truth, a from-scratch dense
//! network stack (reverse-mode gradients + Adam), reconstruction metrics, and
//! a dense articulated tracker driven by a Monte-Carlo smoothed occupancy
//! fitting energy plus a skeletal pose prior.
//!
//! Everything is dimension-generic over `D in {2, 3}`; the desk-scale
//! pipelines run in 2D. See the crate examples for one runnable program per
//! major capability, and the `nasa-occ` binary for the batch CLI.

pub mod binio;
pub mod body;
pub mod cli;
pub mod config;
pub mod dataset;
pub mod kinematics;
pub mod metrics;
pub mod models;
pub mod nn;
pub mod rng;
pub mod svg;
pub mod tracking;
pub mod training;
pub mod vecmath;

pub use body::{AnimationSpec, CapsuleBody, PosedBody};
pub use dataset::{Corpus, FrameSamples};
pub use kinematics::{forward_kinematics, Pose, PosedBones, Rig, RigidTransform};
pub use models::{BlendMode, Model, ModelD, ModelR, ModelU, PoseContext};
pub use nn::{AdamState, MlpShape, ParamVector, ResidualMlp};
pub use tracking::{TrackConfig, TrackState};
pub use training::TrainConfig;
