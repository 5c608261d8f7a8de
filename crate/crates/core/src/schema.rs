//! JSON surface descriptions.
//!
//! ```json
//! {"kind": "rotational", "n": 1, "R": 1.0, "h_plus": "sqrt(R^2-r^2)", "h_minus": "-sqrt(R^2-r^2)"}
//! ```
//!
//! `kind` is `pansu`, `rotational` or `graph`. Profiles (`h_plus`,
//! `h_minus`) are expressions in `r, R, lambda` or one of the built-in names
//! `flat`, `sphere`, `pansu`, `paraboloid:<c>`; a built-in name in `h_minus`
//! means the mirror image of that shape, and a missing `h_minus` mirrors
//! `h_plus`. Graph heights `f` are expressions in `x1..xn, y1..yn, R, lambda`.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{parse_str, Ast};
use crate::heisenberg::Dim;
use crate::surfaces::{
    ExprHeight, GraphSurface, PansuSphere, Profile, ProfileShape, RotationalSurface, Side, Surface,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Pansu,
    Rotational,
    Graph,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSpec {
    pub kind: SurfaceKind,
    #[serde(default = "one_usize")]
    pub n: usize,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(rename = "R", default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub h_plus: Option<String>,
    #[serde(default)]
    pub h_minus: Option<String>,
    #[serde(default)]
    pub f: Option<String>,
    #[serde(default)]
    pub side: Option<Side>,
}

fn one_usize() -> usize {
    1
}

fn missing(field: &str, kind: &str) -> Error {
    Error::Schema {
        path: field.to_string(),
        message: format!("required for kind {kind:?}"),
    }
}

fn profile_field(field: &str, src: &str) -> Result<Profile> {
    Profile::parse(src).map_err(|e| match e {
        Error::InvalidParameter { reason, .. } => Error::Schema {
            path: field.to_string(),
            message: reason,
        },
        other => other,
    })
}

impl SurfaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Schema {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn build(&self) -> Result<Surface> {
        let lambda = self.lambda.unwrap_or(1.0);
        match self.kind {
            SurfaceKind::Pansu => {
                for (field, present) in [
                    ("R", self.radius.is_some()),
                    ("h_plus", self.h_plus.is_some()),
                    ("h_minus", self.h_minus.is_some()),
                    ("f", self.f.is_some()),
                ] {
                    if present {
                        return Err(Error::Schema {
                            path: field.into(),
                            message: "not allowed for kind \"pansu\"".into(),
                        });
                    }
                }
                let dim = Dim::new(self.n)?;
                Ok(PansuSphere::new(dim, lambda)?.into())
            }
            SurfaceKind::Rotational => {
                let src = self.h_plus.as_deref().ok_or_else(|| missing("h_plus", "rotational"))?;
                let upper = profile_field("h_plus", src)?;
                let lower = match self.h_minus.as_deref() {
                    Some(m) => {
                        let p = profile_field("h_minus", m)?;
                        if matches!(p.shape(), ProfileShape::Expr(_)) {
                            p
                        } else {
                            p.mirrored()
                        }
                    }
                    None => match upper.shape() {
                        ProfileShape::Expr(ast) => {
                            Profile::new(ProfileShape::Expr(Ast::Neg(Box::new(ast.clone()))))
                        }
                        _ => upper.clone().mirrored(),
                    },
                };
                let lower = match self.side.unwrap_or(Side::Both) {
                    Side::Both => Some(lower),
                    Side::Upper => None,
                    Side::Lower => {
                        return Err(Error::Schema {
                            path: "side".into(),
                            message: "rotational surfaces need an upper sheet".into(),
                        })
                    }
                };
                let dim = Dim::new(self.n)?;
                let radius = self.radius.unwrap_or(if upper.shape() == &ProfileShape::Pansu {
                    1.0 / lambda
                } else {
                    1.0
                });
                Ok(RotationalSurface::new(dim, radius, lambda, upper, lower)?.into())
            }
            SurfaceKind::Graph => {
                let src = self.f.as_deref().ok_or_else(|| missing("f", "graph"))?;
                let ast = parse_str(src)?;
                let dim = Dim::new(self.n)?;
                let radius = self.radius.unwrap_or(1.0);
                let height = ExprHeight::new(ast, dim, radius, lambda)?;
                Ok(GraphSurface::new(dim, radius, Arc::new(height), self.side.unwrap_or(Side::Both))?.into())
            }
        }
    }
}

pub fn parse_surface(text: &str) -> Result<Surface> {
    SurfaceSpec::from_json(text)?.build()
}

pub fn load_surface(path: impl AsRef<Path>) -> Result<Surface> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_surface(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::ExprError;

    #[test]
    fn examples() {
        let s = parse_surface(r#"{"kind":"pansu","n":1,"lambda":1.0}"#).unwrap();
        assert!(matches!(s, Surface::Pansu(_)));
        let s = parse_surface(
            r#"{"kind":"rotational","n":1,"R":1.0,"h_plus":"sqrt(R^2-r^2)","h_minus":"-sqrt(R^2-r^2)"}"#,
        )
        .unwrap();
        assert_eq!(s.sheets().len(), 2);
        let e = parse_surface(r#"{"kind":"rotational","h_plus":"sqrt(q)"}"#).unwrap_err();
        assert_eq!(
            e,
            Error::Expr(ExprError::UnboundVariable {
                name: "q".into(),
                position: 5
            })
        );
    }

    #[test]
    fn schema_errors_carry_paths() {
        match parse_surface(r#"{"kind":"pansu","n":"one"}"#).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "n"),
            e => panic!("{e:?}"),
        }
        match parse_surface(r#"{"kind":"pansu","colour":1}"#).unwrap_err() {
            Error::Schema { .. } => {}
            e => panic!("{e:?}"),
        }
        match parse_surface(r#"{"kind":"torus"}"#).unwrap_err() {
            Error::Schema { path, .. } => assert_eq!(path, "kind"),
            e => panic!("{e:?}"),
        }
        assert!(matches!(
            parse_surface(r#"{"kind":"graph","n":1}"#),
            Err(Error::Schema { .. })
        ));
    }

    #[test]
    fn builtin_profiles_and_mirrors() {
        let s = parse_surface(r#"{"kind":"rotational","h_plus":"paraboloid:1","h_minus":"paraboloid:1"}"#).unwrap();
        let rot = s.as_rotational().unwrap();
        let (h, _) = rot.eval_profile(0.0, crate::surfaces::Sheet::Lower).unwrap();
        assert_eq!(h, -1.0);
        let s = parse_surface(r#"{"kind":"rotational","h_plus":"1-r^2"}"#).unwrap();
        let rot = s.as_rotational().unwrap();
        let (h, _) = rot.eval_profile(0.5, crate::surfaces::Sheet::Lower).unwrap();
        assert_eq!(h, -0.75);
        let s = parse_surface(r#"{"kind":"rotational","h_plus":"pansu","lambda":2}"#).unwrap();
        assert_eq!(s.radius(), 0.5);
        let s = parse_surface(r#"{"kind":"graph","n":2,"f":"x1*y2","side":"upper"}"#).unwrap();
        assert_eq!(s.sheets().len(), 1);
    }
}
