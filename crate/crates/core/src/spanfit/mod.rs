//! Least-squares fits in the Szegő span, optionally with targets for the
//! Garabedian companion on cut curves.

mod basis;
mod element;

pub use basis::{fit_span_to_target, FitReport, SpanBasis, SPAN_CUTOFF};
pub use element::SpanElement;

/// `σ^{(k)}` at interior points.
pub fn eval_span(element: &SpanElement, points: &[crate::Complex], k: usize) -> crate::Result<Vec<crate::Complex>> {
    element.eval_span(points, k)
}
