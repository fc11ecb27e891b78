//! Truncates the tree of the `+` side of an instance and prints its
//! frontier in order, then the truncation as DOT.

use std::sync::Arc;

use csb_shuffle::csb::{scenario, CsbInstance, SideTree, Sign};
use csb_shuffle::trees::{seq_to_string, truncate, ColoredTree};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = Arc::new(CsbInstance::build(&scenario("absorbed-palette").unwrap())?);
    let tree = SideTree::new(inst, Sign::Plus);
    let tr = truncate(&tree, 3, 2)?;
    println!("{} nodes", tr.len());
    for leaf in tr.frontier(&tree)? {
        let parent = tree.node_color(&leaf[..leaf.len() - 1]).unwrap();
        println!("{}  {}", seq_to_string(&leaf), tree.color_name(&parent));
    }
    println!("{}", tr.to_dot(&tree));
    Ok(())
}
