//! Small fixtures shared by unit tests, integration tests and benchmarks.

use crate::instance::Instance;

/// The five-observation example: a strong triangle {0,1,2}, a strong pair
/// {3,4}, and weak links from 2 to 3 and 4. Every other pair is blocked.
pub fn golden_instance() -> Instance {
    Instance::from_pairs(
        5,
        [
            (0, 1, -100.0),
            (1, 2, -100.0),
            (0, 2, -100.0),
            (3, 4, -100.0),
            (2, 3, -1.0),
            (2, 4, -1.0),
        ],
    )
    .expect("fixture is valid")
}
