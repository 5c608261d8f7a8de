//! Benchmark fixtures shared by the criterion targets.

use heis_cauchy::{parse_surface, QuadratureSpec, Surface};

pub fn surface(json: &str) -> Surface {
    parse_surface(json).expect("fixture surface")
}

pub fn sphere_pair() -> Surface {
    surface(r#"{"kind":"rotational","n":1,"R":1.0,"h_plus":"sphere"}"#)
}

pub fn pansu(n: usize) -> Surface {
    surface(&format!(r#"{{"kind":"pansu","n":{n},"lambda":1.0}}"#))
}

pub fn spec(radial: usize, angular: usize) -> QuadratureSpec {
    QuadratureSpec {
        radial_nodes: radial,
        angular_nodes: angular,
        ..QuadratureSpec::default()
    }
}
