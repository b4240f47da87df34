//! Stream the labeled trace of a run, then summarize it per column.
//!
//! Every record is one JSON line tagged by the statement label it came
//! from; the stream alone is enough to replay the whole run.

use arborescence::trace::TraceEvent;
use arborescence::verbatim::{self, EventLog};
use arborescence::classic;

fn main() {
    let inst = classic::book_that_flight_costs();
    let mut log = EventLog::default();
    let sol = verbatim::solve_observed(&inst, &mut log);

    for event in &log.events {
        println!("{}", event.to_json_line());
    }

    println!();
    println!("{} events, z = {}", log.events.len(), sol.z);
    for k in 1..=inst.n() {
        let labels: Vec<&str> = log
            .events
            .iter()
            .filter(|e| e.k() == k)
            .map(TraceEvent::label)
            .collect();
        if !labels.is_empty() {
            println!("column {k}: {}", labels.join(" "));
        }
    }
}
