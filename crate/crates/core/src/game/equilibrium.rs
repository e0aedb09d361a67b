use super::{Game, MixedProfile};
use crate::error::{Error, Result};

const SINGULAR: f64 = 1e-10;

/// Solves `a x = b` by Gaussian elimination with partial pivoting. Returns
/// `None` when a pivot falls below `1e-10` in magnitude.
pub fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < SINGULAR {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Full-support Nash equilibrium of a strict square two-player zero-sum game
/// (at most 4x4), if one exists.
///
/// Each player's mix is the solution of the opponent's indifference system;
/// a singular system or a solution leaving the open simplex yields `None`.
pub fn zero_sum_interior_equilibrium(game: &Game) -> Result<Option<MixedProfile>> {
    let counts = game.strategy_counts();
    if counts.len() != 2 || counts[0] != counts[1] {
        return Err(Error::Precondition(format!(
            "interior equilibrium solver needs a square two-player game, got {}",
            game.shape_string()
        )));
    }
    let n = counts[0];
    if n > 4 {
        return Err(Error::Precondition(format!("{n}x{n} exceeds the 4x4 limit")));
    }
    let scale = game.payoffs().iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    if game
        .payoffs()
        .chunks(2)
        .any(|pair| (pair[0] + pair[1]).abs() > 1e-12 * scale)
    {
        return Err(Error::Precondition("game is not zero-sum".into()));
    }
    if !game.is_strict() {
        return Err(Error::Precondition("game is not strict".into()));
    }
    let a = |i: usize, j: usize| game.payoff(i * n + j, 0);

    // column mix y with row player indifferent: sum_j a_ij y_j - v = 0
    let Some(y) = indifference(n, a) else {
        return Ok(None);
    };
    // row mix x with column player indifferent: sum_i a_ij x_i - v = 0
    let Some(x) = indifference(n, |j, i| a(i, j)) else {
        return Ok(None);
    };
    if x.iter().chain(&y).any(|&p| p <= 0.0) {
        return Ok(None);
    }

    let profile = MixedProfile::with_tolerance(vec![x.clone(), y.clone()], 1e-9)?;
    let row_values: Vec<f64> = (0..n).map(|i| (0..n).map(|j| a(i, j) * y[j]).sum()).collect();
    let col_values: Vec<f64> = (0..n).map(|j| (0..n).map(|i| -a(i, j) * x[i]).sum()).collect();
    let flat = |v: &[f64]| {
        let hi = v.iter().cloned().fold(f64::MIN, f64::max);
        let lo = v.iter().cloned().fold(f64::MAX, f64::min);
        hi - lo <= 1e-9 * scale
    };
    if !flat(&row_values) || !flat(&col_values) {
        return Ok(None);
    }
    Ok(Some(profile))
}

fn indifference(n: usize, coeff: impl Fn(usize, usize) -> f64) -> Option<Vec<f64>> {
    let mut m = vec![vec![0.0; n + 1]; n + 1];
    let mut rhs = vec![0.0; n + 1];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = coeff(i, j);
        }
        m[i][n] = -1.0;
    }
    for j in 0..n {
        m[n][j] = 1.0;
    }
    rhs[n] = 1.0;
    let mut sol = solve_linear(m, rhs)?;
    sol.truncate(n);
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solve_linear_small_system() {
        let x = solve_linear(vec![vec![2.0, 1.0], vec![1.0, 3.0]], vec![3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-12 && (x[1] - 1.4).abs() < 1e-12);
        assert!(solve_linear(vec![vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn matching_pennies_is_uniform() {
        let mp = Game::zero_sum(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        let eq = zero_sum_interior_equilibrium(&mp).unwrap().unwrap();
        assert_eq!(eq.dists(), &[vec![0.5, 0.5], vec![0.5, 0.5]]);
    }

    #[test]
    fn rock_paper_scissors_is_uniform() {
        let rps = Game::zero_sum(&[
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ])
        .unwrap();
        let eq = zero_sum_interior_equilibrium(&rps).unwrap().unwrap();
        for d in eq.dists() {
            for &p in d {
                assert!((p - 1.0 / 3.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dominant_strategy_has_no_interior_equilibrium() {
        let g = Game::zero_sum(&[vec![3.0, 2.0], vec![1.0, 0.0]]).unwrap();
        assert!(zero_sum_interior_equilibrium(&g).unwrap().is_none());
    }

    #[test]
    fn preconditions() {
        let rect = Game::zero_sum(&[vec![1.0, 2.0, 3.0], vec![3.0, 1.0, 2.0]]).unwrap();
        assert!(zero_sum_interior_equilibrium(&rect).is_err());
        let general = Game::bimatrix(
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert!(zero_sum_interior_equilibrium(&general).is_err());
    }
}
