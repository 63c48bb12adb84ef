//! The test oracle: the only thing that reads the ground truth.

use alloc::vec::Vec;
use core::fmt;

use crate::population::InfectionVector;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestEntry {
    /// Pool members, sorted ascending.
    pub items: Vec<usize>,
    pub contaminated: bool,
    /// Whether the test was a first-stage test on a freshly formed set.
    pub root: bool,
}

/// Recorded tests, printable one line per test.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestLog(pub Vec<TestEntry>);

impl fmt::Display for TestLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for entry in &self.0 {
            let mut first = true;
            for item in &entry.items {
                if !first {
                    f.write_str(",")?;
                }
                write!(f, "{item}")?;
                first = false;
            }
            let result = if entry.contaminated { "positive" } else { "negative" };
            writeln!(f, "\t{result}")?;
        }
        Ok(())
    }
}

/// Noiseless OR-channel over a hidden [`InfectionVector`] with test accounting.
#[derive(Debug, Clone)]
pub struct Oracle {
    truth: InfectionVector,
    test_count: usize,
    negative_root_count: usize,
    log: Option<TestLog>,
}

impl Oracle {
    pub fn new(truth: InfectionVector) -> Self {
        Self { truth, test_count: 0, negative_root_count: 0, log: None }
    }

    pub fn with_log(truth: InfectionVector) -> Self {
        Self { log: Some(TestLog::default()), ..Self::new(truth) }
    }

    pub fn population_size(&self) -> usize {
        self.truth.len()
    }

    /// Tests `items` together; `true` means at least one is defective.
    pub fn test(&mut self, items: &[usize]) -> Result<bool> {
        self.query(items, false)
    }

    /// A first-stage test on a newly formed set; negatives are tallied separately.
    pub fn test_root(&mut self, items: &[usize]) -> Result<bool> {
        let positive = self.query(items, true)?;
        if !positive {
            self.negative_root_count += 1;
        }
        Ok(positive)
    }

    fn query(&mut self, items: &[usize], root: bool) -> Result<bool> {
        if items.is_empty() {
            return Err(Error::Usage("cannot test an empty pool"));
        }
        let positive = items.iter().any(|&i| self.truth.is_defective(i));
        self.test_count += 1;
        if let Some(log) = self.log.as_mut() {
            let mut sorted = items.to_vec();
            sorted.sort_unstable();
            log.0.push(TestEntry { items: sorted, contaminated: positive, root });
        }
        Ok(positive)
    }

    pub fn test_count(&self) -> usize {
        self.test_count
    }

    pub fn negative_root_count(&self) -> usize {
        self.negative_root_count
    }

    pub fn log(&self) -> Option<&TestLog> {
        self.log.as_ref()
    }

    pub fn take_log(&mut self) -> Option<TestLog> {
        self.log.take()
    }

    /// Clears the counters and the log, keeping the truth.
    pub fn reset(&mut self) {
        self.test_count = 0;
        self.negative_root_count = 0;
        if let Some(log) = self.log.as_mut() {
            log.0.clear();
        }
    }

    /// Ground truth, for end-of-run verification only.
    pub fn truth(&self) -> &InfectionVector {
        &self.truth
    }
}
