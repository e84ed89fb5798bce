//! Triplet and plan text formats.
//!
//! One triplet per line: `O1 --oor--> C1r`. Unknown behavior codes and
//! malformed places are rejected. Plan files carry a `S:<place> G:<place>`
//! header line followed by the plan's triplets in order.

use thiserror::Error;

use super::{Plan, SemanticGraph, Triplet};
use crate::places::PlaceId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TripletParseError {
    #[error("line {0}: expected `<from> --<code>--> <to>`")]
    BadShape(usize),
    #[error("line {0}: {1}")]
    BadPlace(usize, String),
    #[error("line {0}: unknown behavior code {1:?}")]
    BadCode(usize, String),
    #[error("line {0}: {1}")]
    Incompatible(usize, String),
    #[error("missing `S:<place> G:<place>` header")]
    MissingHeader,
    #[error("plan is not a connected chain at step {0}")]
    BrokenChain(usize),
}

/// Parse one `from --code--> to` line.
pub fn parse_triplet_line(line: &str, lineno: usize) -> Result<Triplet, TripletParseError> {
    let parts: Vec<&str> = line.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(TripletParseError::BadShape(lineno));
    }
    let mid = parts[1];
    let code_str = mid
        .strip_prefix("--")
        .and_then(|s| s.strip_suffix("-->"))
        .ok_or(TripletParseError::BadShape(lineno))?;
    let from: PlaceId = parts[0]
        .parse()
        .map_err(|e| TripletParseError::BadPlace(lineno, format!("{e}")))?;
    let to: PlaceId = parts[2]
        .parse()
        .map_err(|e| TripletParseError::BadPlace(lineno, format!("{e}")))?;
    let code = code_str
        .parse()
        .map_err(|_| TripletParseError::BadCode(lineno, code_str.to_string()))?;
    Triplet::new(from, code, to).map_err(|e| TripletParseError::Incompatible(lineno, e.to_string()))
}

/// Serialize a graph as its sorted triplet list.
pub fn graph_to_string(graph: &SemanticGraph) -> String {
    let mut out = String::new();
    for t in graph.edges() {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

/// Parse a triplet file into a topology-only graph.
pub fn parse_graph(text: &str) -> Result<SemanticGraph, TripletParseError> {
    let mut triplets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        triplets.push(parse_triplet_line(line, i)?);
    }
    Ok(SemanticGraph::from_parts([], triplets, None))
}

/// Serialize a plan: header then its triplets.
pub fn plan_to_string(plan: &Plan) -> String {
    let mut out = format!("S:{} G:{}\n", plan.start, plan.goal);
    for t in &plan.triplets {
        out.push_str(&t.to_string());
        out.push('\n');
    }
    out
}

/// Parse a plan file, checking the chain is connected in order.
pub fn parse_plan(text: &str) -> Result<Plan, TripletParseError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| {
        let l = l.trim();
        !l.is_empty() && !l.starts_with('#')
    });
    let (hn, header) = lines.next().ok_or(TripletParseError::MissingHeader)?;
    let header = header.trim();
    let (s_part, g_part) = header
        .split_once(' ')
        .ok_or(TripletParseError::MissingHeader)?;
    let start: PlaceId = s_part
        .strip_prefix("S:")
        .ok_or(TripletParseError::MissingHeader)?
        .parse()
        .map_err(|e| TripletParseError::BadPlace(hn, format!("{e}")))?;
    let goal: PlaceId = g_part
        .strip_prefix("G:")
        .ok_or(TripletParseError::MissingHeader)?
        .parse()
        .map_err(|e| TripletParseError::BadPlace(hn, format!("{e}")))?;

    let mut triplets = Vec::new();
    for (i, raw) in lines {
        triplets.push(parse_triplet_line(raw.trim(), i)?);
    }
    // Chain consistency: each hop leaves the previous target, modulo the
    // entrance expansion (cf lands on EO k, io leaves EO k into O k).
    let mut expected = start;
    for (i, t) in triplets.iter().enumerate() {
        if t.from != expected {
            return Err(TripletParseError::BrokenChain(i));
        }
        expected = t.to;
    }
    if let Some(last) = triplets.last() {
        if last.to != goal {
            return Err(TripletParseError::BrokenChain(triplets.len()));
        }
    }
    Ok(Plan {
        start,
        goal,
        triplets,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floorplan::{generate_floorplan, GenConfig};
    use crate::places::Side;
    use crate::semgraph::{extract_graph, plan_route, BehaviorCode};

    #[test]
    fn triplet_line_round_trips() {
        let t = Triplet::new(
            PlaceId::Office(1),
            BehaviorCode::Oor,
            PlaceId::Corridor(1, Side::R),
        )
        .unwrap();
        let line = t.to_string();
        assert_eq!(line, "O1 --oor--> C1r");
        assert_eq!(parse_triplet_line(&line, 0).unwrap(), t);
    }

    #[test]
    fn rejects_unknown_codes_and_bad_places() {
        assert!(matches!(
            parse_triplet_line("O1 --zzz--> C1r", 3),
            Err(TripletParseError::BadCode(3, _))
        ));
        assert!(matches!(
            parse_triplet_line("Q1 --cf--> C1r", 0),
            Err(TripletParseError::BadPlace(..))
        ));
        assert!(matches!(
            parse_triplet_line("O1 -cf-> C1r", 0),
            Err(TripletParseError::BadShape(0))
        ));
        // Type-incompatible edges are rejected too.
        assert!(matches!(
            parse_triplet_line("H1 --cf--> C1r", 0),
            Err(TripletParseError::Incompatible(..))
        ));
    }

    #[test]
    fn graph_round_trips_losslessly() {
        let plan = generate_floorplan(4, &GenConfig::default()).unwrap();
        let graph = extract_graph(&plan).unwrap();
        let text = graph_to_string(&graph);
        let parsed = parse_graph(&text).unwrap();
        assert_eq!(parsed.edges(), graph.edges());
        assert_eq!(graph_to_string(&parsed), text);
    }

    #[test]
    fn plan_round_trips() {
        let plan = generate_floorplan(4, &GenConfig::default()).unwrap();
        let graph = extract_graph(&plan).unwrap();
        let offices: Vec<u32> = graph.offices().collect();
        let route = plan_route(
            &graph,
            PlaceId::Office(offices[0]),
            PlaceId::Office(offices[offices.len() - 1]),
        )
        .unwrap();
        let text = plan_to_string(&route);
        assert!(text.starts_with(&format!("S:O{} G:O{}\n", offices[0], offices[offices.len() - 1])));
        let parsed = parse_plan(&text).unwrap();
        assert_eq!(parsed, route);
        assert_eq!(plan_to_string(&parsed), text);
    }

    #[test]
    fn plan_chain_must_connect() {
        let text = "S:O1 G:O2\nO1 --oor--> C1r\nC2r --cf--> EO2\nEO2 --ior--> O2\n";
        assert!(matches!(
            parse_plan(text),
            Err(TripletParseError::BrokenChain(1))
        ));
    }
}
