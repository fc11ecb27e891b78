//! Elements of infinite rank on the synthetic scenario: their branches,
//! tail classes and transport between addresses.

use csb_shuffle::csb::{branch_class_rep, scenario, synthetic_elem, CsbInstance, Sign, StratumResult};
use csb_shuffle::order::{Dyadic, Rational};
use csb_shuffle::skolem::points::{Ent, Periodic};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let inst = CsbInstance::build(&scenario("synthetic-branch").unwrap())?;
    let r_elems: Vec<Dyadic> = (0..)
        .map(Dyadic::from_index)
        .filter(|d| inst.sentinel_set().contains(*d))
        .take(3)
        .collect();
    let r = Periodic::new(vec![Ent::Dy(r_elems[2])], vec![Ent::Dy(r_elems[0]), Ent::Dy(r_elems[1])]);
    let x = synthetic_elem(&r, inst.q00(), Rational::new(1, 3));
    if let StratumResult::Infinite { branch } = inst.stratum(Sign::Plus, &x, 6)? {
        let class = branch_class_rep(&branch);
        println!("branch {:?}\nclass {}", branch.take(6), class.tag());
        let sigma: Vec<Dyadic> = branch.take(2).iter().filter_map(|e| e.dyadic()).collect();
        let tau = vec![r_elems[1], r_elems[0]];
        let y = inst.tail_transport(Sign::Plus, &sigma, &tau, &x)?;
        println!("{x}\n  -> {y}");
        println!("  h_r: {}", inst.h_r(Sign::Plus, &branch, &x)?);
    }
    Ok(())
}
