//! Layered SVG rendering for tree and acyclic structures.

use hypermon::{KripkeStructure, StateId};

const LEVEL_DX: usize = 150;
const ROW_DY: usize = 64;
const MARGIN: usize = 40;
const NODE_W: usize = 96;
const NODE_H: usize = 34;

/// Longest-path level per state, ignoring self-loops; states unreachable
/// from the initial state root at their own component.
fn levels(k: &KripkeStructure) -> Vec<usize> {
    let n = k.state_count();
    let mut level = vec![0usize; n];
    // Relaxation passes suffice at demo scale; the edge relation is acyclic
    // apart from self-loops.
    for _ in 0..n {
        let mut changed = false;
        for (from, to) in k.edges() {
            if from != to && level[to] < level[from] + 1 {
                level[to] = level[from] + 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    level
}

fn node_label(k: &KripkeStructure, s: StateId) -> String {
    let props: Vec<String> = k.label(s).props().map(|p| p.name().to_string()).collect();
    if props.is_empty() {
        format!("s{s}: {{}}")
    } else {
        format!("s{s}: {}", props.join(","))
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Renders the structure as a standalone SVG element.
pub fn structure_svg(k: &KripkeStructure) -> String {
    let n = k.state_count();
    let level = levels(k);
    let max_level = level.iter().copied().max().unwrap_or(0);

    // Row slot per state within its level, ordered by id.
    let mut row = vec![0usize; n];
    let mut rows_per_level = vec![0usize; max_level + 1];
    for s in 0..n {
        row[s] = rows_per_level[level[s]];
        rows_per_level[level[s]] += 1;
    }
    let max_rows = rows_per_level.iter().copied().max().unwrap_or(1);

    let x = |s: StateId| MARGIN + level[s] * LEVEL_DX;
    let y = |s: StateId| MARGIN + row[s] * ROW_DY;
    let width = 2 * MARGIN + max_level * LEVEL_DX + NODE_W;
    let height = 2 * MARGIN + (max_rows.saturating_sub(1)) * ROW_DY + NODE_H;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {width} {height}\" \
         width=\"{width}\" height=\"{height}\" font-family=\"monospace\" font-size=\"12\">"
    ));
    out.push_str(
        "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" \
         markerWidth=\"7\" markerHeight=\"7\" orient=\"auto-start-reverse\">\
         <path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"#64748b\"/></marker></defs>",
    );

    for (from, to) in k.edges() {
        if from == to {
            let cx = x(from) + NODE_W;
            let cy = y(from) + NODE_H / 2;
            out.push_str(&format!(
                "<path d=\"M {x0} {y0} C {x1} {y1}, {x1} {y2}, {x0} {y3}\" fill=\"none\" \
                 stroke=\"#64748b\" marker-end=\"url(#arrow)\"/>",
                x0 = cx,
                y0 = cy - 6,
                x1 = cx + 26,
                y1 = cy - 16,
                y2 = cy + 16,
                y3 = cy + 6,
            ));
        } else {
            out.push_str(&format!(
                "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"#64748b\" \
                 marker-end=\"url(#arrow)\"/>",
                x1 = x(from) + NODE_W,
                y1 = y(from) + NODE_H / 2,
                x2 = x(to),
                y2 = y(to) + NODE_H / 2,
            ));
        }
    }

    for s in 0..n {
        let stroke = if s == k.init() { "#0f766e" } else { "#475569" };
        let stroke_width = if s == k.init() { 2.5 } else { 1.0 };
        out.push_str(&format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{NODE_W}\" height=\"{NODE_H}\" rx=\"8\" \
             fill=\"#f8fafc\" stroke=\"{stroke}\" stroke-width=\"{stroke_width}\"/>",
            x = x(s),
            y = y(s),
        ));
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" fill=\"#0f172a\">{label}</text>",
            x = x(s) + 8,
            y = y(s) + NODE_H / 2 + 4,
            label = escape(&node_label(k, s)),
        ));
    }

    out.push_str("</svg>");
    out
}
