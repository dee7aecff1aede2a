/// Tensor-product grid over an axis-aligned box, including both endpoints of
/// every axis. Points come out with the first axis varying slowest.
#[derive(Debug, Clone)]
pub struct Grid {
    lo: Vec<f64>,
    hi: Vec<f64>,
    steps: Vec<usize>,
    counter: Vec<usize>,
    done: bool,
}

impl Grid {
    /// `steps[k]` points along axis `k`; one step means the midpoint.
    pub fn new(lo: &[f64], hi: &[f64], steps: &[usize]) -> Self {
        assert!(lo.len() == hi.len() && lo.len() == steps.len());
        Self {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
            steps: steps.to_vec(),
            counter: vec![0; lo.len()],
            done: steps.contains(&0),
        }
    }

    pub fn uniform(lo: &[f64], hi: &[f64], density: usize) -> Self {
        Self::new(lo, hi, &vec![density; lo.len()])
    }

    /// `density` points per axis strictly inside the box, spaced as if the
    /// endpoints were also sampled.
    pub fn interior(lo: &[f64], hi: &[f64], density: usize) -> Self {
        let gap = |l: f64, h: f64| (h - l) / (density + 1) as f64;
        let lo2: Vec<f64> = lo.iter().zip(hi).map(|(&l, &h)| l + gap(l, h)).collect();
        let hi2: Vec<f64> = lo.iter().zip(hi).map(|(&l, &h)| h - gap(l, h)).collect();
        Self::uniform(&lo2, &hi2, density)
    }

    pub fn len(&self) -> usize {
        self.steps.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn coordinate(&self, axis: usize) -> f64 {
        let (lo, hi, n) = (self.lo[axis], self.hi[axis], self.steps[axis]);
        if n == 1 {
            0.5 * (lo + hi)
        } else {
            let k = self.counter[axis];
            if k == n - 1 {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (n - 1) as f64
            }
        }
    }
}

impl Iterator for Grid {
    type Item = Vec<f64>;

    fn next(&mut self) -> Option<Vec<f64>> {
        if self.done {
            return None;
        }
        let point = (0..self.lo.len()).map(|k| self.coordinate(k)).collect();
        self.done = true;
        for axis in (0..self.counter.len()).rev() {
            self.counter[axis] += 1;
            if self.counter[axis] < self.steps[axis] {
                self.done = false;
                break;
            }
            self.counter[axis] = 0;
        }
        Some(point)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interior_grid_avoids_the_boundary() {
        let pts: Vec<_> = Grid::interior(&[0.0], &[4.0], 3).collect();
        assert_eq!(pts, vec![vec![1.0], vec![2.0], vec![3.0]]);
    }

    #[test]
    fn enumerates_endpoints_in_order() {
        let pts: Vec<_> = Grid::new(&[0.0, 10.0], &[1.0, 20.0], &[2, 3]).collect();
        assert_eq!(
            pts,
            vec![
                vec![0.0, 10.0],
                vec![0.0, 15.0],
                vec![0.0, 20.0],
                vec![1.0, 10.0],
                vec![1.0, 15.0],
                vec![1.0, 20.0],
            ]
        );
    }

    #[test]
    fn zero_dimensional_grid_has_one_point() {
        let pts: Vec<_> = Grid::uniform(&[], &[], 9).collect();
        assert_eq!(pts, vec![Vec::<f64>::new()]);
    }

    #[test]
    fn single_step_is_midpoint() {
        let pts: Vec<_> = Grid::uniform(&[-1.0], &[3.0], 1).collect();
        assert_eq!(pts, vec![vec![1.0]]);
    }
}
