use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use crate::problem::Configuration;

const NO_WINNER: usize = usize::MAX;

/// Set-once termination flag shared by all workers. The first worker to
/// publish a solution wins; later publications are ignored.
///
/// Workers also report their iteration count at every communication step.
/// When the flag is set those counts are snapshotted, which lets a run
/// measure how far each worker went past the termination event.
#[derive(Debug)]
pub struct TerminationBoard {
    winner: AtomicUsize,
    winner_iterations: AtomicU64,
    solution: Mutex<Option<Configuration>>,
    progress: Vec<AtomicU64>,
    snapshot: Mutex<Option<Vec<u64>>>,
}

impl TerminationBoard {
    pub fn new(num_workers: usize) -> Self {
        TerminationBoard {
            winner: AtomicUsize::new(NO_WINNER),
            winner_iterations: AtomicU64::new(0),
            solution: Mutex::new(None),
            progress: (0..num_workers).map(|_| AtomicU64::new(0)).collect(),
            snapshot: Mutex::new(None),
        }
    }

    pub fn is_set(&self) -> bool {
        self.winner.load(Ordering::SeqCst) != NO_WINNER
    }

    pub fn winner(&self) -> Option<usize> {
        let w = self.winner.load(Ordering::SeqCst);
        (w != NO_WINNER).then_some(w)
    }

    pub fn winner_iterations(&self) -> u64 {
        self.winner_iterations.load(Ordering::SeqCst)
    }

    pub fn report_progress(&self, rank: usize, iterations: u64) {
        self.progress[rank].store(iterations, Ordering::SeqCst);
    }

    /// Returns `true` if this call set the flag.
    pub fn try_publish(&self, rank: usize, iterations: u64, solution: Configuration) -> bool {
        if self
            .winner
            .compare_exchange(NO_WINNER, rank, Ordering::SeqCst, Ordering::SeqCst)
            .is_err()
        {
            return false;
        }
        let snapshot = self.progress.iter().map(|p| p.load(Ordering::SeqCst)).collect();
        *self.snapshot.lock().unwrap() = Some(snapshot);
        self.winner_iterations.store(iterations, Ordering::SeqCst);
        *self.solution.lock().unwrap() = Some(solution);
        true
    }

    pub fn solution(&self) -> Option<Configuration> {
        self.solution.lock().unwrap().clone()
    }

    /// Last reported iteration count of every worker when the flag was set.
    pub fn progress_at_termination(&self) -> Option<Vec<u64>> {
        self.snapshot.lock().unwrap().clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{ProblemKind, ProblemSpec};
    use std::sync::Barrier;

    #[test]
    fn first_writer_wins() {
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 4).unwrap();
        let sol = Configuration::new(&spec, vec![0, 3, 1, 2]).unwrap();
        let board = TerminationBoard::new(2);
        assert!(!board.is_set());
        board.report_progress(1, 40);
        assert!(board.try_publish(0, 17, sol.clone()));
        assert!(!board.try_publish(1, 3, sol.clone()));
        assert_eq!(board.winner(), Some(0));
        assert_eq!(board.winner_iterations(), 17);
        assert_eq!(board.solution(), Some(sol));
        assert_eq!(board.progress_at_termination(), Some(vec![0, 40]));
    }

    #[test]
    fn simultaneous_publication_has_one_winner() {
        let spec = ProblemSpec::new(ProblemKind::AllInterval, 4).unwrap();
        let sol = Configuration::new(&spec, vec![0, 3, 1, 2]).unwrap();
        for _ in 0..200 {
            let board = TerminationBoard::new(8);
            let barrier = Barrier::new(8);
            let wins: usize = std::thread::scope(|s| {
                let handles: Vec<_> = (0..8)
                    .map(|r| {
                        let (board, barrier, sol) = (&board, &barrier, sol.clone());
                        s.spawn(move || {
                            barrier.wait();
                            board.try_publish(r, r as u64, sol) as usize
                        })
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().unwrap()).sum()
            });
            assert_eq!(wins, 1);
            let w = board.winner().unwrap();
            assert_eq!(board.winner_iterations(), w as u64);
        }
    }
}
