use std::time::Instant;

/// Clock used for search budgets and progress timestamps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimerKind {
    /// CPU time consumed by the calling thread. Each search run is confined
    /// to one thread, so this is the run's own CPU time.
    ThreadCpu,
    Wall,
}

impl TimerKind {
    /// Thread CPU time where the platform offers it, wall clock otherwise.
    pub fn preferred() -> Self {
        if thread_cpu_seconds().is_some() {
            TimerKind::ThreadCpu
        } else {
            TimerKind::Wall
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TimerKind::ThreadCpu => "thread-cpu",
            TimerKind::Wall => "wall",
        }
    }
}

#[cfg(unix)]
fn thread_cpu_seconds() -> Option<f64> {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid, writable timespec.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    (rc == 0).then_some(ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9)
}

#[cfg(not(unix))]
fn thread_cpu_seconds() -> Option<f64> {
    None
}

/// Elapsed-seconds stopwatch. Must be read on the thread that started it
/// when using [`TimerKind::ThreadCpu`].
#[derive(Debug, Clone)]
pub struct Stopwatch {
    kind: TimerKind,
    wall_start: Instant,
    cpu_start: f64,
}

impl Stopwatch {
    pub fn start(kind: TimerKind) -> Self {
        Self {
            kind,
            wall_start: Instant::now(),
            cpu_start: thread_cpu_seconds().unwrap_or(0.0),
        }
    }

    pub fn kind(&self) -> TimerKind {
        self.kind
    }

    pub fn elapsed(&self) -> f64 {
        match self.kind {
            TimerKind::ThreadCpu => thread_cpu_seconds().map_or(0.0, |t| t - self.cpu_start),
            TimerKind::Wall => self.wall_start.elapsed().as_secs_f64(),
        }
    }
}
