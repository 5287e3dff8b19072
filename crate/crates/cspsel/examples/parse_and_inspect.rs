//! The instance format: parsing, constraint semantics and round-tripping.
//!
//! Run with:
//! ```bash
//! cargo run --example parse_and_inspect
//! ```

use cspsel::instance::ConstraintKind;
use cspsel::parse_instance;

fn main() {
    let text = "\
# a small scheduling-flavoured instance
instance demo
var slot_a 0..3
var slot_b 0..3
var slot_c 0..3
var carry aux {0,1}
order slot_c slot_a slot_b carry
con alldifferent ( slot_a slot_b slot_c )
con rel slot_a < slot_b + 1
con ext forbidden ( slot_c carry ) { (0,0) ; (3,1) }
";

    let inst = parse_instance(text).expect("parses");
    println!("instance `{}`:", inst.name);
    for v in &inst.variables {
        println!(
            "  var {:8} domain {:?}{}",
            v.name,
            v.domain,
            if v.aux { "  (aux)" } else { "" }
        );
    }
    println!(
        "  ordering: {:?}",
        inst.ordering
            .iter()
            .map(|&i| inst.variables[i].name.as_str())
            .collect::<Vec<_>>()
    );

    println!("\nconstraint semantics:");
    for (i, c) in inst.constraints.iter().enumerate() {
        let kind = match &c.kind {
            ConstraintKind::AllDifferent => "alldifferent".to_string(),
            ConstraintKind::Relation { op, offset } => format!("rel {} + {offset}", op.symbol()),
            ConstraintKind::Extension { polarity, tuples } => {
                format!("ext {polarity:?} ({} tuples)", tuples.len())
            }
        };
        println!("  constraint {i}: {kind}, arity {}", c.arity());
    }

    // alldifferent over (slot_a, slot_b, slot_c)
    let ad = &inst.constraints[0];
    println!("\n  alldifferent (1,2,3) -> {:?}", inst.satisfies(ad, &[1, 2, 3]));
    println!("  alldifferent (1,1,3) -> {:?}", inst.satisfies(ad, &[1, 1, 3]));
    // precondition violations are errors, not silent answers
    println!("  alldifferent (9,9,9) -> {:?}", inst.satisfies(ad, &[9, 9, 9]));

    // the renderer emits the same format, so instances survive a round trip
    let rendered = inst.render();
    let reparsed = parse_instance(&rendered).expect("round-trips");
    println!("\nrender -> parse round trip equal: {}", inst == reparsed);
    println!("\nrendered form:\n{rendered}");
}
