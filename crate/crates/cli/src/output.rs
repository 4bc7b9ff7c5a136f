//! CSV emission and deterministic fan-out.
//!
//! All numeric columns go through [`fmt_float`] (scientific notation, twelve
//! significant digits) so that a given scenario always produces byte-identical
//! files. Grid evaluation can fan out over threads — capped by the
//! `CVML_THREADS` environment variable — but rows are computed in contiguous
//! chunks and reassembled in grid order, so the thread count never changes
//! the output.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Scientific notation with 12 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.11e}")
}

/// One commented block of rows inside a CSV file.
///
/// Single-table files use one section; multi-panel figures use one section
/// per panel, separated by their `#` comment lines.
pub struct Section {
    /// Comment lines for this section (emitted with a `# ` prefix).
    pub comments: Vec<String>,
    /// Column names, emitted as a `# columns:` comment.
    pub columns: Vec<&'static str>,
    /// Data rows; each entry must match `columns` in length.
    pub rows: Vec<Vec<String>>,
}

/// Write header comments and sections to `out`, or stdout when `out` is None.
pub fn write_csv(out: Option<&Path>, header: &[String], sections: &[Section]) -> io::Result<()> {
    match out {
        Some(path) => {
            let file = File::create(path)?;
            let mut w = BufWriter::new(file);
            emit(&mut w, header, sections)?;
            w.flush()
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            emit(&mut w, header, sections)
        }
    }
}

fn emit<W: Write>(w: &mut W, header: &[String], sections: &[Section]) -> io::Result<()> {
    for line in header {
        writeln!(w, "# {line}")?;
    }
    for section in sections {
        for line in &section.comments {
            writeln!(w, "# {line}")?;
        }
        writeln!(w, "# columns: {}", section.columns.join(","))?;
        for row in &section.rows {
            debug_assert_eq!(row.len(), section.columns.len());
            writeln!(w, "{}", row.join(","))?;
        }
    }
    Ok(())
}

/// Number of worker threads: hardware parallelism, capped by `CVML_THREADS`.
fn thread_budget() -> usize {
    let hardware = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var("CVML_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
    {
        Some(cap) if cap >= 1 => hardware.min(cap),
        _ => hardware,
    }
}

/// Evaluate `f(0..count)` across threads, returning results in index order.
///
/// Contiguous chunks keep the work deterministic: the chunk boundaries depend
/// only on `count` and the thread budget, and results are concatenated in
/// chunk order, so callers see the same row order as a sequential loop.
pub fn parallel_rows<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let threads = thread_budget().min(count.max(1));
    if threads <= 1 {
        return (0..count).map(f).collect();
    }
    let chunk = count.div_ceil(threads);
    let f = &f;
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for start in (0..count).step_by(chunk) {
            let end = (start + chunk).min(count);
            handles.push(scope.spawn(move || (start..end).map(f).collect::<Vec<T>>()));
        }
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker thread panicked"))
            .collect()
    })
}
