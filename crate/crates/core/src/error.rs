//! Library-wide error type.

use thiserror::Error;

/// Errors produced by geometry kernels, optimizers, and scene I/O.
#[derive(Debug, Error)]
pub enum Error {
    /// Mesh is empty or violates basic index invariants.
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    /// A signed distance query was issued against a mesh that is not watertight.
    #[error("signed distance queries require a watertight mesh")]
    SignRequiresWatertight,

    /// Requested more surface samples than the dense pre-sample can supply.
    #[error("sample budget exceeded: requested {requested}, pre-sample holds {available}")]
    SampleBudgetExceeded { requested: usize, available: usize },

    /// Convex hull input is degenerate (fewer than 4 points, or coplanar).
    #[error("degenerate convex hull input: {0}")]
    DegenerateHull(String),

    /// Occupancy grid would exceed the configured cell budget.
    #[error("voxel grid of {cells} cells exceeds budget of {budget}")]
    GridTooLarge { cells: u64, budget: u64 },

    /// Projection left no point visible in front of the camera.
    #[error("no visible points after projection")]
    NoVisiblePoints,

    /// Mask has no foreground pixels.
    #[error("mask has no foreground pixels")]
    EmptyMask,

    /// Contact designation resolves to an empty vertex set.
    #[error("contact designation is empty")]
    EmptyContactSet,

    /// Hand parameter vector has the wrong shape.
    #[error("invalid hand parameters: {0}")]
    InvalidParams(String),

    /// Detection box has non-positive area or lies outside the image.
    #[error("invalid detection box: {0}")]
    InvalidBox(String),

    /// Object initialization places it outside the camera frustum.
    #[error("object lies outside the camera frustum at initialization")]
    ObjectOutsideFrustum,

    /// Candidate generation requires the object center away from the camera origin.
    #[error("object center coincides with the camera origin")]
    ObjectAtCameraOrigin,

    /// An optimizer produced a non-finite loss.
    #[error("optimization diverged: {0}")]
    DivergedOptimization(String),

    /// The drop-test integrator produced a non-finite state.
    #[error("simulation diverged at step {step}")]
    SimulationDiverged { step: usize },

    /// Pipeline stages were requested out of their fixed order.
    #[error("stage order violation: {0}")]
    StageOrderError(String),

    /// Scene file failed schema validation; `path` is the offending field.
    #[error("scene parse error at `{path}`: {message}")]
    SceneParseError { path: String, message: String },

    /// A referenced asset file is missing or unreadable.
    #[error("missing asset: {0}")]
    MissingAsset(String),

    /// Unknown contact region name.
    #[error("unknown contact region `{0}`")]
    UnknownContactRegion(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code buckets: 2 for validation failures, 3 for divergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DivergedOptimization(_)
            | Error::SimulationDiverged { .. }
            | Error::ObjectOutsideFrustum => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
