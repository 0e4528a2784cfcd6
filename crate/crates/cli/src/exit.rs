//! Exit codes and the mapping from library errors.

use dioph_core::cylinder::CylinderError;
use dioph_core::geometry::GeometryError;
use dioph_core::nesterenko::NesterenkoError;
use dioph_core::records::RecordError;
use dioph_core::certified::ScalarError;

pub const OK: i32 = 0;
/// A check failed or a precondition does not hold.
pub const FAILED: i32 = 1;
pub const BUDGET: i32 = 2;
pub const PRECISION: i32 = 3;
pub const USAGE: i32 = 64;
pub const DATA: i32 = 65;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn new(code: i32, message: impl Into<String>) -> Failure {
        Failure { code, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Failure {
        Failure::new(USAGE, message)
    }

    pub fn data(message: impl Into<String>) -> Failure {
        Failure::new(DATA, message)
    }

    pub fn failed(message: impl Into<String>) -> Failure {
        Failure::new(FAILED, message)
    }
}

fn scalar_code(e: &ScalarError) -> i32 {
    match e {
        ScalarError::PrecisionExhausted { .. } => PRECISION,
        _ => FAILED,
    }
}

fn geometry_code(e: &GeometryError) -> i32 {
    match e {
        GeometryError::Scalar(s) => scalar_code(s),
        _ => FAILED,
    }
}

impl From<RecordError> for Failure {
    fn from(e: RecordError) -> Failure {
        let code = match &e {
            RecordError::InvalidBound => USAGE,
            RecordError::BudgetExceeded { .. } => BUDGET,
            RecordError::PrecisionExhausted { .. } => PRECISION,
            RecordError::Csv(_) => DATA,
            RecordError::Geometry(g) => geometry_code(g),
            RecordError::TooFewRecords { .. } | RecordError::DegenerateRecords => FAILED,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<CylinderError> for Failure {
    fn from(e: CylinderError) -> Failure {
        let code = cylinder_code(&e);
        Failure::new(code, e.to_string())
    }
}

pub fn cylinder_code(e: &CylinderError) -> i32 {
    match e {
        CylinderError::BudgetExceeded { .. } => BUDGET,
        CylinderError::PrecisionExhausted { .. } => PRECISION,
        CylinderError::Geometry(g) => geometry_code(g),
        CylinderError::Precondition(_) | CylinderError::DegenerateT => FAILED,
    }
}

impl From<NesterenkoError> for Failure {
    fn from(e: NesterenkoError) -> Failure {
        let code = match &e {
            NesterenkoError::PrecisionExhausted(_) => PRECISION,
            NesterenkoError::Geometry(g) => geometry_code(g),
            _ => FAILED,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Failure {
        Failure::new(geometry_code(&e), e.to_string())
    }
}
