//! Metric construction from configuration presets.

use lck_core::fields::generators::{self, TrigPoly};
use lck_core::fields::{MetricField, TorusGeometry};

use crate::config::{MetricSpec, PresetKind, RunConfig};
use crate::{snapshot, CliError};

/// Grid of a configuration.
pub fn geometry(cfg: &RunConfig) -> Result<TorusGeometry, CliError> {
    Ok(TorusGeometry::new(cfg.n, cfg.grid())?)
}

/// Build the metric described by `spec` on `geom`.
pub fn build(geom: TorusGeometry, spec: &MetricSpec) -> Result<MetricField, CliError> {
    let (n, s, amp, bw) = (geom.n(), spec.seed, spec.amp, spec.bandwidth);
    let m = match spec.preset {
        PresetKind::Flat => generators::flat(geom),
        PresetKind::RandomFourier => generators::random_fourier(geom, s, amp, bw)?,
        PresetKind::ConformalFlat => generators::conformal_flat(geom, &TrigPoly::random(n, s, amp, bw))?,
        PresetKind::KahlerPotential => generators::kahler_potential(geom, s, amp, bw)?,
        PresetKind::ProductTwist => generators::product_twist(geom, spec.eps)?,
        PresetKind::Snapshot => {
            let path = spec.path.as_deref().ok_or_else(|| CliError::Config("snapshot preset needs a path".into()))?;
            let m = snapshot::read_metric(path)?;
            if m.geometry() != geom {
                return Err(CliError::Config(format!("{}: snapshot grid does not match the configuration", path.display())));
            }
            m
        }
    };
    Ok(m)
}
