//! Strips sampled elements down to their rank and address, and rebuilds
//! them from the frontier leaf.

use csb_shuffle::csb::{scenario, CsbInstance, Sign};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = CsbInstance::build(&scenario("absorbed-palette").unwrap())?;
    for x in inst.sample_elements(Sign::Plus, 8, 3)? {
        let s = inst.stratum(Sign::Plus, &x, inst.depth())?;
        let leaf = inst.g_inverse(Sign::Plus, &x)?;
        assert_eq!(inst.g_forward(Sign::Plus, &leaf)?, x);
        println!("{x}\n  {}", s.to_json());
    }
    Ok(())
}
