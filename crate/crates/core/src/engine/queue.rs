//! Bounded task queue that spills batches to disk.

use std::collections::VecDeque;
use std::path::PathBuf;

use super::codec::{read_batch, write_batch};
use super::task::Task;
use crate::error::EngineError;

/// A FIFO of at most `capacity` in-memory tasks. Pushing into a full queue
/// first writes its last `batch` tasks to a new file. Popping from a queue
/// holding fewer than `batch` tasks first loads the oldest file back.
pub struct SpillQueue {
    tasks: VecDeque<Task>,
    files: VecDeque<PathBuf>,
    capacity: usize,
    batch: usize,
    dir: PathBuf,
    prefix: String,
    next_file: u64,
    files_written: usize,
    peak_len: usize,
}

impl SpillQueue {
    pub fn new(capacity: usize, batch: usize, dir: PathBuf, prefix: impl Into<String>) -> Self {
        assert!(batch >= 1 && capacity >= batch, "need capacity >= batch >= 1");
        SpillQueue {
            tasks: VecDeque::new(),
            files: VecDeque::new(),
            capacity,
            batch,
            dir,
            prefix: prefix.into(),
            next_file: 0,
            files_written: 0,
            peak_len: 0,
        }
    }

    pub fn push(&mut self, t: Task) -> Result<(), EngineError> {
        if self.tasks.len() >= self.capacity {
            self.spill()?;
        }
        self.tasks.push_back(t);
        self.peak_len = self.peak_len.max(self.tasks.len());
        Ok(())
    }

    pub fn pop(&mut self) -> Result<Option<Task>, EngineError> {
        if self.tasks.len() < self.batch {
            self.refill()?;
        }
        Ok(self.tasks.pop_front())
    }

    fn spill(&mut self) -> Result<(), EngineError> {
        let at = self.tasks.len() - self.batch;
        let tail: Vec<Task> = self.tasks.drain(at..).collect();
        let path = self.dir.join(format!("{}-{}.bin", self.prefix, self.next_file));
        self.next_file += 1;
        write_batch(&path, &tail)?;
        self.files.push_back(path);
        self.files_written += 1;
        Ok(())
    }

    fn refill(&mut self) -> Result<(), EngineError> {
        let Some(path) = self.files.pop_front() else {
            return Ok(());
        };
        let tasks = read_batch(&path)?;
        std::fs::remove_file(&path).map_err(|source| EngineError::Spill { path: path.clone(), source })?;
        self.tasks.extend(tasks);
        self.peak_len = self.peak_len.max(self.tasks.len());
        Ok(())
    }

    /// Tasks in memory.
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty() && self.files.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Task> {
        self.tasks.iter()
    }

    pub fn pending_files(&self) -> usize {
        self.files.len()
    }

    pub fn files_written(&self) -> usize {
        self.files_written
    }

    pub fn peak_len(&self) -> usize {
        self.peak_len
    }
}
