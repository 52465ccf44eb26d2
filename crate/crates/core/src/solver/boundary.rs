use crate::error::{domain, Result};
use crate::grid::{Field, TensorGrid};
use crate::kernel::Nonlinearity;
use crate::scalar::Real;

/// Condition on the top face `λ = Λ`.
#[derive(Debug, Clone)]
pub enum TopCondition<T: Real> {
    /// One value per base node.
    Dirichlet(Vec<T>),
    /// Zero weighted flux (the natural condition of the energy).
    Natural,
}

/// Condition on the bottom face `λ = 0`.
#[derive(Debug, Clone)]
pub enum BottomCondition<T: Real> {
    /// `-d_s lim λ^a ∂_λ v = f(v)`.
    NonlinearNeumann(Nonlinearity<T>),
    /// One value per base node.
    Dirichlet(Vec<T>),
}

/// Boundary data on a truncated cylinder. Lateral values are listed in node
/// order over every node with `|x_i| = R` and take precedence over top and
/// bottom values on shared edges.
#[derive(Debug, Clone)]
pub struct BoundarySpec<T: Real> {
    pub lateral: Vec<T>,
    pub top: TopCondition<T>,
    pub bottom: BottomCondition<T>,
}

/// Indices of the lateral nodes, ascending.
pub fn lateral_nodes<T: Real>(grid: &TensorGrid<T>) -> Vec<usize> {
    (0..grid.num_nodes()).filter(|&i| grid.is_lateral(i)).collect()
}

fn sample_base<T: Real>(grid: &TensorGrid<T>, layer: usize, f: &impl Fn([T; 2], T) -> T) -> Vec<T> {
    (0..grid.base_nodes())
        .map(|b| {
            let (x, l) = grid.node_coords(layer * grid.base_nodes() + b);
            f(x, l)
        })
        .collect()
}

pub(crate) struct Constraints<T> {
    pub fixed: Vec<bool>,
    pub values: Vec<T>,
}

impl<T: Real> BoundarySpec<T> {
    /// Dirichlet data on every face, sampled from `f([x, y], λ)`.
    pub fn dirichlet_from_fn(grid: &TensorGrid<T>, f: impl Fn([T; 2], T) -> T) -> Self {
        Self {
            lateral: Self::lateral_from_fn(grid, &f),
            top: TopCondition::Dirichlet(sample_base(grid, grid.nlambda(), &f)),
            bottom: BottomCondition::Dirichlet(sample_base(grid, 0, &f)),
        }
    }

    /// Nonlinear Neumann bottom with lateral data (and top data unless
    /// `natural_top`) sampled from `f`.
    pub fn neumann_from_fn(
        grid: &TensorGrid<T>,
        nl: Nonlinearity<T>,
        natural_top: bool,
        f: impl Fn([T; 2], T) -> T,
    ) -> Self {
        let top = if natural_top {
            TopCondition::Natural
        } else {
            TopCondition::Dirichlet(sample_base(grid, grid.nlambda(), &f))
        };
        Self {
            lateral: Self::lateral_from_fn(grid, &f),
            top,
            bottom: BottomCondition::NonlinearNeumann(nl),
        }
    }

    /// Lateral and top data copied from `field`, with the given bottom.
    pub fn from_field(field: &Field<T>, bottom: BottomCondition<T>) -> Self {
        let g = field.grid();
        let v = field.values();
        let top0 = g.nlambda() * g.base_nodes();
        Self {
            lateral: lateral_nodes(g).into_iter().map(|i| v[i]).collect(),
            top: TopCondition::Dirichlet(v[top0..].to_vec()),
            bottom,
        }
    }

    fn lateral_from_fn(grid: &TensorGrid<T>, f: &impl Fn([T; 2], T) -> T) -> Vec<T> {
        lateral_nodes(grid)
            .into_iter()
            .map(|i| {
                let (x, l) = grid.node_coords(i);
                f(x, l)
            })
            .collect()
    }

    pub fn nonlinearity(&self) -> Option<&Nonlinearity<T>> {
        match &self.bottom {
            BottomCondition::NonlinearNeumann(nl) => Some(nl),
            BottomCondition::Dirichlet(_) => None,
        }
    }

    pub(crate) fn constraints(&self, grid: &TensorGrid<T>) -> Result<Constraints<T>> {
        let n = grid.num_nodes();
        let base = grid.base_nodes();
        let mut fixed = vec![false; n];
        let mut values = vec![T::zero(); n];
        if let BottomCondition::Dirichlet(b) = &self.bottom {
            if b.len() != base {
                return domain(format!("bottom data has {} values, face has {base} nodes", b.len()));
            }
            for (i, &v) in b.iter().enumerate() {
                fixed[i] = true;
                values[i] = v;
            }
        }
        if let TopCondition::Dirichlet(t) = &self.top {
            if t.len() != base {
                return domain(format!("top data has {} values, face has {base} nodes", t.len()));
            }
            let off = grid.nlambda() * base;
            for (k, &v) in t.iter().enumerate() {
                fixed[off + k] = true;
                values[off + k] = v;
            }
        }
        let lat = lateral_nodes(grid);
        if self.lateral.len() != lat.len() {
            return domain(format!(
                "lateral data has {} values, faces have {} nodes",
                self.lateral.len(),
                lat.len()
            ));
        }
        for (&i, &v) in lat.iter().zip(&self.lateral) {
            fixed[i] = true;
            values[i] = v;
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return domain(format!("non-finite boundary value at node {i}"));
        }
        Ok(Constraints { fixed, values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::build_grid;

    #[test]
    fn face_counts_are_checked() {
        let g = build_grid::<f64>(1, 1.0, 1.0, 4, 4, 1.0).unwrap();
        let mut bc = BoundarySpec::dirichlet_from_fn(&g, |x, l| x[0] + l);
        assert_eq!(bc.lateral.len(), 10);
        assert!(bc.constraints(&g).is_ok());
        bc.lateral.pop();
        assert!(bc.constraints(&g).is_err());
        let bc = BoundarySpec {
            lateral: vec![0.0; 10],
            top: TopCondition::Dirichlet(vec![0.0; 4]),
            bottom: BottomCondition::Dirichlet(vec![0.0; 5]),
        };
        assert!(bc.constraints(&g).is_err());
    }

    #[test]
    fn lateral_counts_in_two_dimensions() {
        let g = build_grid::<f64>(2, 1.0, 1.0, 4, 4, 1.0).unwrap();
        // 16 perimeter nodes per layer, 5 layers
        assert_eq!(lateral_nodes(&g).len(), 16 * 5);
    }
}
