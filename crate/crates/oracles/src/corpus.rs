//! Test systems `F(x, y) = 0` with exact seeds, shared by several suites.

#[derive(Debug, Clone)]
pub struct System {
    pub name: &'static str,
    pub functions: &'static [&'static str],
    pub variables: &'static [&'static str],
    pub n: usize,
    pub seed: &'static [f64],
    /// Initial box half-width to use; `None` means the solver default.
    pub half_width: Option<f64>,
}

impl System {
    pub fn m(&self) -> usize {
        self.variables.len() - self.n
    }

    pub fn seed_x(&self) -> Vec<f64> {
        self.seed[..self.n].to_vec()
    }

    pub fn seed_y(&self) -> Vec<f64> {
        self.seed[self.n..].to_vec()
    }
}

pub fn circle() -> System {
    System {
        name: "circle",
        functions: &["x^2 + y^2 - 1"],
        variables: &["x", "y"],
        n: 1,
        seed: &[0.0, 1.0],
        half_width: Some(0.9),
    }
}

pub fn quadratic_pair() -> System {
    System {
        name: "quadratic pair",
        functions: &["y1^2 + y2 - x - 1", "y1 + y2^2 - x - 1"],
        variables: &["x", "y1", "y2"],
        n: 1,
        seed: &[1.0, 1.0, 1.0],
        half_width: None,
    }
}

/// Systems mixing polynomial and transcendental terms, `m` from 1 to 3.
pub fn jacobian_suite() -> Vec<System> {
    vec![
        circle(),
        System {
            name: "sine cubic",
            functions: &["sin(x) + y^3 + y"],
            variables: &["x", "y"],
            n: 1,
            seed: &[0.0, 0.0],
            half_width: None,
        },
        quadratic_pair(),
        System {
            name: "exp sine pair",
            functions: &["exp(y1) - 1 + y2 - x1*x2", "sin(y2) - y1 - 0.5*x1 + x2^2"],
            variables: &["x1", "x2", "y1", "y2"],
            n: 2,
            seed: &[0.0, 0.0, 0.0, 0.0],
            half_width: None,
        },
        System {
            name: "cubic sine pair",
            functions: &["y1 + y2^3 - x1 - 0.5*x2", "y2 - sin(y1) - x1*x2"],
            variables: &["x1", "x2", "y1", "y2"],
            n: 2,
            seed: &[0.0, 0.0, 0.0, 0.0],
            half_width: None,
        },
        System {
            name: "three coupled",
            functions: &[
                "y1 + 0.2*y2^2 - x + 0.1*sin(y3)",
                "y2 + 0.3*y1*y3 - 0.5*x^2",
                "y3 + exp(y1) - 1 - 0.2*x",
            ],
            variables: &["x", "y1", "y2", "y3"],
            n: 1,
            seed: &[0.0, 0.0, 0.0, 0.0],
            half_width: None,
        },
    ]
}
