//! Lazily evaluated isomorphisms with invariant checks and a trace.

use std::cmp::Ordering;
use std::sync::Mutex;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::order::{Element, Rational};
use crate::skolem::points::Point;

/// Values that can appear in a witness trace.
pub trait Traced {
    fn trace_json(&self) -> Value;
}

impl Traced for Element {
    fn trace_json(&self) -> Value {
        self.to_json()
    }
}

impl Traced for Point {
    fn trace_json(&self) -> Value {
        self.to_json()
    }
}

impl Traced for Rational {
    fn trace_json(&self) -> Value {
        Value::String(self.to_string())
    }
}

pub type MapFn<X, Y> = Box<dyn Fn(&X) -> Result<Y> + Send + Sync>;
pub type CmpFn<X> = Box<dyn Fn(&X, &X) -> Ordering + Send + Sync>;

struct State<S, D> {
    memo: Vec<(S, D)>,
    trace: Vec<Value>,
}

/// An order isomorphism evaluated on demand.
///
/// Every new value is checked against the memo: the memo must stay
/// increasing in both coordinates, and each image must map back to its
/// argument. Violations are reported as `WitnessViolation`.
pub struct IsoWitness<S, D> {
    name: String,
    fwd: MapFn<S, D>,
    bwd: MapFn<D, S>,
    cmp_s: CmpFn<S>,
    cmp_d: CmpFn<D>,
    state: Mutex<State<S, D>>,
}

impl<S: Clone + Traced, D: Clone + Traced> IsoWitness<S, D> {
    pub fn new(name: impl Into<String>, fwd: MapFn<S, D>, bwd: MapFn<D, S>, cmp_s: CmpFn<S>, cmp_d: CmpFn<D>) -> Self {
        IsoWitness {
            name: name.into(),
            fwd,
            bwd,
            cmp_s,
            cmp_d,
            state: Mutex::new(State {
                memo: Vec::new(),
                trace: Vec::new(),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn compare_source(&self, a: &S, b: &S) -> Ordering {
        (self.cmp_s)(a, b)
    }

    pub fn compare_target(&self, a: &D, b: &D) -> Ordering {
        (self.cmp_d)(a, b)
    }

    pub fn forward(&self, x: &S) -> Result<D> {
        {
            let st = self.state.lock().unwrap();
            if let Ok(i) = st.memo.binary_search_by(|(p, _)| (self.cmp_s)(p, x)) {
                return Ok(st.memo[i].1.clone());
            }
        }
        let y = (self.fwd)(x)?;
        let back = (self.bwd)(&y)?;
        if (self.cmp_s)(&back, x) != Ordering::Equal {
            return Err(Error::WitnessViolation(format!(
                "{}: roundtrip of {} gave {}",
                self.name,
                x.trace_json(),
                back.trace_json()
            )));
        }
        self.record(x.clone(), y.clone(), "fwd")?;
        Ok(y)
    }

    pub fn backward(&self, y: &D) -> Result<S> {
        {
            let st = self.state.lock().unwrap();
            if let Ok(i) = st.memo.binary_search_by(|(_, q)| (self.cmp_d)(q, y)) {
                return Ok(st.memo[i].0.clone());
            }
        }
        let x = (self.bwd)(y)?;
        let fwd = (self.fwd)(&x)?;
        if (self.cmp_d)(&fwd, y) != Ordering::Equal {
            return Err(Error::WitnessViolation(format!(
                "{}: roundtrip of {} gave {}",
                self.name,
                y.trace_json(),
                fwd.trace_json()
            )));
        }
        self.record(x.clone(), y.clone(), "bwd")?;
        Ok(x)
    }

    fn record(&self, x: S, y: D, dir: &str) -> Result<()> {
        let mut st = self.state.lock().unwrap();
        let i = match st.memo.binary_search_by(|(p, _)| (self.cmp_s)(p, &x)) {
            Ok(i) => {
                if (self.cmp_d)(&st.memo[i].1, &y) != Ordering::Equal {
                    return Err(Error::WitnessViolation(format!("{}: not a function", self.name)));
                }
                return Ok(());
            }
            Err(i) => i,
        };
        let below_ok = i == 0 || (self.cmp_d)(&st.memo[i - 1].1, &y) == Ordering::Less;
        let above_ok = i == st.memo.len() || (self.cmp_d)(&y, &st.memo[i].1) == Ordering::Less;
        if !below_ok || !above_ok {
            return Err(Error::WitnessViolation(format!(
                "{}: order not preserved at {} -> {}",
                self.name,
                x.trace_json(),
                y.trace_json()
            )));
        }
        let step = st.trace.len();
        let line = if dir == "fwd" {
            json!({ "step": step, "dir": dir, "src": x.trace_json(), "dst": y.trace_json() })
        } else {
            json!({ "step": step, "dir": dir, "src": y.trace_json(), "dst": x.trace_json() })
        };
        st.trace.push(line);
        st.memo.insert(i, (x, y));
        Ok(())
    }

    /// Number of memoized pairs.
    pub fn evaluated(&self) -> usize {
        self.state.lock().unwrap().memo.len()
    }

    /// The trace as JSON lines, one evaluation per line.
    pub fn trace_jsonl(&self) -> String {
        let st = self.state.lock().unwrap();
        st.trace.iter().map(|v| v.to_string() + "\n").collect()
    }

    pub fn trace(&self) -> Vec<Value> {
        self.state.lock().unwrap().trace.clone()
    }
}
