use std::fmt::Write;

use crate::kernel::context::Emcs;
use crate::kernel::kb::{Kb, Theory};
use crate::logics::datalog::Rule;
use crate::logics::gl_reduct;

/// Canonical text of a system; [`super::parse_system`] reads it back to an
/// equal system.
///
/// Knowledge bases holding a lazily reduced program are written out as the
/// explicit ground reduct over the system's constant pool.
pub fn serialize_system(system: &Emcs) -> String {
    let mut out = String::new();
    if !system.declared_constants().is_empty() {
        out.push_str("constants ");
        for (k, c) in system.declared_constants().iter().enumerate() {
            if k > 0 {
                out.push_str(", ");
            }
            c.write_constant(&mut out).unwrap();
        }
        out.push_str(";\n\n");
    }
    for (i, c) in system.contexts().iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let kind = if c.is_observation() {
            "observation"
        } else {
            c.kind().as_str()
        };
        writeln!(out, "context {} : {} {{", c.name(), kind).unwrap();
        if let Some(v) = c.declared_vocab() {
            let items: Vec<String> = v.iter().map(|(p, a)| format!("{p}/{a}")).collect();
            if items.is_empty() {
                out.push_str("  vocab ;\n");
            } else {
                writeln!(out, "  vocab {};", items.join(", ")).unwrap();
            }
        }
        let ops: Vec<&str> = c.op_base().iter().map(|o| o.as_str()).collect();
        if ops.is_empty() {
            out.push_str("  ops ;\n");
        } else {
            writeln!(out, "  ops {};", ops.join(", ")).unwrap();
        }
        let kb = match c.kb().theory() {
            Theory::Reduced(r) => gl_reduct(c.kb(), r.against(), system.pool()),
            _ => c.kb().clone(),
        };
        write_kb(&mut out, &kb);
        if !c.bridge_rules().is_empty() {
            out.push_str("  bridge {\n");
            for r in c.bridge_rules() {
                writeln!(out, "    {r}").unwrap();
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
    }
    out
}

fn write_kb(out: &mut String, kb: &Kb) {
    let mut lines: Vec<String> = kb.facts().iter().map(|f| format!("{f}.")).collect();
    match kb.theory() {
        Theory::None | Theory::Reduced(_) => {}
        Theory::Program(p) => lines.extend(p.rules().iter().map(rule_text)),
        Theory::Ontology(o) => lines.extend(o.axioms().iter().map(|a| a.to_string())),
    }
    if lines.is_empty() {
        return;
    }
    out.push_str("  kb {\n");
    for l in lines {
        writeln!(out, "    {l}").unwrap();
    }
    out.push_str("  }\n");
}

/// A rule with an empty body is written `H <- .` so it does not read back
/// as a fact.
fn rule_text(r: &Rule) -> String {
    if r.positive.is_empty() && r.negative.is_empty() {
        format!("{} <- .", r.head)
    } else {
        r.to_string()
    }
}
