//! Interval coloring for bounded-arboricity graphs: the engine runs the
//! degeneracy oracle, which reads induced subgraphs off a maintained
//! low out-degree orientation.

use thiserror::Error;

use crate::graph::{EdgeOp, UpdateEvent};
use crate::interval::{EngineConfig, EngineError, IntervalEngine, UpdateReport};
use crate::orientation::{Orientation, OrientationError};
use crate::static_color::DegeneracyOracle;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArbError {
    #[error(transparent)]
    Orientation(#[from] OrientationError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArbPipelineConfig {
    pub alpha: usize,
    /// Orientation out-degree cap; `None` means `4α`.
    pub cap: Option<usize>,
    pub engine: EngineConfig,
}

impl ArbPipelineConfig {
    pub fn new(n: usize, alpha: usize, beta: f64) -> Self {
        ArbPipelineConfig { alpha: alpha.max(1), cap: None, engine: EngineConfig::new(n, beta) }
    }

    pub fn cap(mut self, cap: usize) -> Self {
        self.cap = Some(cap);
        self
    }

    pub fn engine(mut self, engine: EngineConfig) -> Self {
        self.engine = engine;
        self
    }

    pub fn effective_cap(&self) -> usize {
        self.cap.unwrap_or(4 * self.alpha)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ArbReport {
    pub engine: UpdateReport,
    pub flips: u64,
}

pub struct ArbPipeline {
    cfg: ArbPipelineConfig,
    orientation: Orientation,
    engine: IntervalEngine,
}

impl ArbPipeline {
    pub fn new(cfg: ArbPipelineConfig) -> Result<Self, ArbError> {
        let engine = IntervalEngine::new(cfg.engine.clone(), Box::new(DegeneracyOracle::new(cfg.alpha)))?;
        let orientation = Orientation::new(engine.n(), cfg.effective_cap());
        Ok(ArbPipeline { cfg, orientation, engine })
    }

    pub fn config(&self) -> &ArbPipelineConfig {
        &self.cfg
    }

    pub fn engine(&self) -> &IntervalEngine {
        &self.engine
    }

    pub fn orientation(&self) -> &Orientation {
        &self.orientation
    }

    /// Reorients first, so the oracle sees the post-update graph.
    pub fn pipeline_update(&mut self, ev: &UpdateEvent) -> Result<ArbReport, ArbError> {
        self.engine.graph().validate(ev).map_err(EngineError::from)?;
        let flips = match ev.op {
            EdgeOp::Insert => self.orientation.orient_insert(ev.u, ev.v)?,
            EdgeOp::Delete => {
                self.orientation.orient_delete(ev.u, ev.v)?;
                0
            }
        };
        let engine = self.engine.process_update(ev, Some(&self.orientation))?;
        Ok(ArbReport { engine, flips })
    }
}
