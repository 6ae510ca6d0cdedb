//! Builtin functions, tables, and linear maps shared by the command line
//! driver and the regression suite.

use std::sync::Arc;

use crate::algebra::{AlgebraDescriptor, Element, Field};
use crate::error::Result;
use crate::expand::CpSeries;
use crate::gns::{nondilatable_norm, table_function};
use crate::linalg::{ceye, cr, CMat};
use crate::positivity::{build_counterexample_phi, ClosureFunction, LinearMapData};
use crate::semigroup::{AbsoluteValue, SemigroupTable};

/// One row of the builtin listing.
pub struct CatalogEntry {
    pub name: &'static str,
    pub kind: &'static str,
    pub summary: &'static str,
}

/// Every builtin, in listing order.
pub fn catalog() -> Vec<CatalogEntry> {
    vec![
        CatalogEntry {
            name: "example-7.4",
            kind: "disc function",
            summary: "bounded disc function that is completely positive of type W yet \
                      not positive definite; ships with its stored two-point witness",
        },
        CatalogEntry {
            name: "nondilatable-l1",
            kind: "norm table",
            summary: "bounded coordinate-sum function whose truncation norms grow as \
                      the square root of the truncation size, so no dilation exists",
        },
        CatalogEntry {
            name: "diag-1-z-extreme",
            kind: "table function",
            summary: "two-letter table carrying the function t to diag(1, t); the \
                      minimal dilation is the direct sum of two extreme characters \
                      and the function is not homogeneous",
        },
        CatalogEntry {
            name: "transpose-map",
            kind: "linear map",
            summary: "transpose on 2x2 complex matrices, positive but not completely \
                      positive, with Choi spectrum {-1, 1, 1, 1}",
        },
        CatalogEntry {
            name: "0.5+0.3t^2",
            kind: "scalar series",
            summary: "interval function 0.5 + 0.3 t^2, a nonnegative coefficient series \
                      below unit mass",
        },
        CatalogEntry {
            name: "trace-poly",
            kind: "operator function",
            summary: "0.1 + 0.5 trace + 0.25 trace^2 on 2x2 real matrices, a bounded \
                      positive definite polynomial",
        },
    ]
}

/// The separating disc function together with its stored two-point
/// witness pair.
pub fn example_7_4() -> (ClosureFunction, [Element; 2]) {
    build_counterexample_phi()
}

/// Two-letter table domain whose function takes diag(1, 0) at the zero
/// letter and the identity at the unit letter, the table form of the
/// function t to diag(1, t).
pub fn diag_1_z_extreme() -> Result<(Arc<AlgebraDescriptor>, ClosureFunction)> {
    let table = Arc::new(SemigroupTable::mult01());
    let alpha = AbsoluteValue::ones(table.letters);
    let domain = AlgebraDescriptor::semigroup(table, alpha)?;
    let mut at_zero = CMat::zeros(2, 2);
    at_zero[(0, 0)] = cr(1.0);
    let phi = table_function(&domain, vec![at_zero, ceye(2)], "diag-1-z-extreme")?;
    Ok((domain, phi))
}

/// The same function read analytically on the real interval: t to
/// diag(1, t) as an operator function on 1x1 real matrices.
pub fn diag_1_z_function() -> ClosureFunction {
    let domain = AlgebraDescriptor::matrix(1, Field::Real);
    ClosureFunction::new(domain, 2, "diag-1-z-extreme", |a| {
        let z = a.matrix()?[(0, 0)];
        let mut out = CMat::zeros(2, 2);
        out[(0, 0)] = cr(1.0);
        out[(1, 1)] = z;
        Ok(out)
    })
}

/// Transpose on 2x2 complex matrices.
pub fn transpose_map() -> LinearMapData {
    LinearMapData::from_closure(2, 2, |x| x.transpose())
}

/// The coefficient series of 0.5 + 0.3 t^2.
pub fn quadratic_series() -> CpSeries {
    CpSeries::from_scalars(&[0.5, 0.0, 0.3])
}

/// The series 0.5 + 0.3 t^2 as a function on 1x1 real matrices.
pub fn quadratic_function() -> ClosureFunction {
    let domain = AlgebraDescriptor::matrix(1, Field::Real);
    ClosureFunction::new(domain, 1, "0.5+0.3t^2", |a| {
        let z = a.matrix()?[(0, 0)];
        Ok(CMat::from_element(1, 1, cr(0.5) + z * z * cr(0.3)))
    })
}

/// Evenly spaced samples of 0.5 + 0.3 t^2 on a symmetric interval grid.
pub fn quadratic_samples(count: usize) -> Vec<(f64, CMat)> {
    let series = quadratic_series();
    let last = count.max(2) - 1;
    (0..count.max(2))
        .map(|i| {
            let t = -0.9 + 1.8 * (i as f64) / (last as f64);
            (t, series.eval(t))
        })
        .collect()
}

/// Bounded positive definite polynomial on 2x2 real matrices.
pub fn trace_polynomial() -> ClosureFunction {
    let domain = AlgebraDescriptor::matrix(2, Field::Real);
    ClosureFunction::new(domain, 1, "trace-poly", |a| {
        let t = a.matrix()?.trace();
        Ok(CMat::from_element(1, 1, cr(0.1) + t * cr(0.5) + t * t * cr(0.25)))
    })
}

/// Truncation norm table of the non-dilatable coordinate-sum function.
pub fn nondilatable_l1(sizes: &[usize]) -> Vec<(usize, f64)> {
    sizes.iter().map(|&n| (n, nondilatable_norm(n))).collect()
}
