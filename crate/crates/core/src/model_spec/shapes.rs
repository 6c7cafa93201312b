//! Best-effort per-layer output shape propagation.
//!
//! Shapes exclude the batch dimension and are channels last, e.g. `(28, 28, 1)`.
//! A layer whose output cannot be computed yields [`Shape::Unknown`], and
//! every later layer is then `Unknown` as well.

use super::{LayerKind, LayerSpec, ModelSpec, Padding};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    Known(Vec<u64>),
    Unknown,
}

impl Shape {
    pub fn dims(&self) -> Option<&[u64]> {
        match self {
            Shape::Known(d) => Some(d),
            Shape::Unknown => None,
        }
    }

    /// Size of the last axis, i.e. what a dense layer's kernel consumes.
    pub fn feature_size(&self) -> Option<u64> {
        self.dims().and_then(|d| d.last().copied())
    }
}

/// One output shape per layer, in layer order.
pub fn infer_shapes(spec: &ModelSpec) -> Vec<Shape> {
    let mut current = match &spec.dataset().input_shape {
        Some(dims) => Shape::Known(dims.clone()),
        None => Shape::Unknown,
    };
    spec.layers()
        .iter()
        .map(|layer| {
            current = match current.dims() {
                Some(dims) => layer_output(layer, dims).map_or(Shape::Unknown, Shape::Known),
                None => Shape::Unknown,
            };
            current.clone()
        })
        .collect()
}

fn layer_output(layer: &LayerSpec, input: &[u64]) -> Option<Vec<u64>> {
    match &layer.kind {
        LayerKind::Conv1d | LayerKind::Conv2d => {
            let rank = layer.kind.spatial_rank()?;
            let kernel = per_axis(layer.kernel_size.as_deref()?, rank)?;
            let strides = per_axis(layer.strides.as_deref().unwrap_or(&[1]), rank)?;
            let padding = layer.padding.unwrap_or(Padding::Valid);
            let mut out = spatial(input, rank, &kernel, &strides, padding)?;
            out.push(layer.filters?);
            Some(out)
        }
        kind if kind.is_pooling() => {
            let rank = kind.spatial_rank()?;
            let pool = per_axis(layer.pool_size.as_deref().unwrap_or(&[2]), rank)?;
            let strides = match layer.strides.as_deref() {
                Some(s) => per_axis(s, rank)?,
                None => pool.clone(),
            };
            let padding = layer.padding.unwrap_or(Padding::Valid);
            let mut out = spatial(input, rank, &pool, &strides, padding)?;
            out.push(*input.last()?);
            Some(out)
        }
        LayerKind::Flatten => input
            .iter()
            .try_fold(1u64, |acc, d| acc.checked_mul(*d))
            .map(|n| vec![n]),
        LayerKind::Dense => {
            let (_, batch_dims) = input.split_last()?;
            let mut out = batch_dims.to_vec();
            out.push(layer.units?);
            Some(out)
        }
        LayerKind::Dropout | LayerKind::BatchNormalization | LayerKind::Activation => {
            Some(input.to_vec())
        }
        _ => None,
    }
}

/// Expands a single value to every axis; otherwise the length must match.
fn per_axis(values: &[u64], rank: usize) -> Option<Vec<u64>> {
    match values.len() {
        1 => Some(vec![values[0]; rank]),
        n if n == rank => Some(values.to_vec()),
        _ => None,
    }
}

/// Spatial output dims for a sliding window over `input[..rank]`; `input`
/// must be exactly `rank` spatial axes plus one channel axis.
fn spatial(
    input: &[u64],
    rank: usize,
    window: &[u64],
    strides: &[u64],
    padding: Padding,
) -> Option<Vec<u64>> {
    if input.len() != rank + 1 {
        return None;
    }
    input[..rank]
        .iter()
        .zip(window)
        .zip(strides)
        .map(|((&len, &w), &s)| {
            if s == 0 || w == 0 {
                return None;
            }
            match padding {
                Padding::Same => Some(len.div_ceil(s)),
                Padding::Valid if len >= w => Some((len - w) / s + 1),
                Padding::Valid => None,
            }
        })
        .collect()
}
