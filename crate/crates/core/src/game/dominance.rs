use super::{Game, PureProfile, SubgameSpec};

/// Removes pure strategies strictly dominated by another pure strategy, round
/// after round, until nothing changes. The survivor does not depend on the
/// elimination order.
pub fn iterated_strict_dominance(game: &Game) -> SubgameSpec {
    let n = game.num_players();
    let mut sets: Vec<Vec<usize>> = game
        .strategy_counts()
        .iter()
        .map(|&c| (0..c).collect())
        .collect();
    loop {
        let mut changed = false;
        for p in 0..n {
            let current = SubgameSpec::new(sets.clone()).expect("survivor sets stay nonempty");
            let antiprofiles = antiprofiles_within(&current, p);
            let dominated: Vec<usize> = sets[p]
                .iter()
                .copied()
                .filter(|&s| {
                    sets[p].iter().any(|&t| {
                        t != s
                            && antiprofiles.iter().all(|q| {
                                payoff_at(game, q, p, t) > payoff_at(game, q, p, s)
                            })
                    })
                })
                .collect();
            if !dominated.is_empty() {
                sets[p].retain(|s| !dominated.contains(s));
                changed = true;
            }
        }
        if !changed {
            return SubgameSpec::new(sets).expect("survivor sets stay nonempty");
        }
    }
}

/// Profiles of `y` with player `p`'s coordinate left as a placeholder.
fn antiprofiles_within(y: &SubgameSpec, p: usize) -> Vec<PureProfile> {
    let mut sets = y.sets().to_vec();
    sets[p] = vec![0];
    SubgameSpec::new(sets)
        .expect("nonempty")
        .profiles()
        .collect()
}

fn payoff_at(game: &Game, anti: &PureProfile, p: usize, s: usize) -> f64 {
    let q = anti.deviate(p, s);
    game.payoff(game.profile_index(q.strategies()), p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matching_pennies_survives_whole() {
        let mp = Game::zero_sum(&[vec![1.0, -1.0], vec![-1.0, 1.0]]).unwrap();
        assert_eq!(iterated_strict_dominance(&mp), SubgameSpec::full(&[2, 2]));
    }

    #[test]
    fn prisoners_dilemma_collapses() {
        // cooperate = 0, defect = 1
        let pd = Game::bimatrix(
            &[vec![3.0, 0.0], vec![5.0, 1.0]],
            &[vec![3.0, 5.0], vec![0.0, 1.0]],
        )
        .unwrap();
        assert_eq!(iterated_strict_dominance(&pd).sets(), &[vec![1], vec![1]]);
    }

    #[test]
    fn dominated_column_removed() {
        // column 2 pays the column player exactly 1 less than column 0 everywhere
        let g = Game::bimatrix(
            &[vec![1.0, 0.0, 2.0], vec![0.0, 1.0, 3.0]],
            &[vec![2.0, 0.0, 1.0], vec![0.0, 2.0, -1.0]],
        )
        .unwrap();
        let y = iterated_strict_dominance(&g);
        assert_eq!(y.sets(), &[vec![0, 1], vec![0, 1]]);
        let restricted = g.restrict(&y).unwrap().game;
        assert_eq!(
            iterated_strict_dominance(&restricted),
            SubgameSpec::full(&[2, 2])
        );
    }
}
