use qseries::series::{exp_int, Series, coeff_int};
use qseries::qobjects::Monomial;
use qseries::transforms::{theorem_sides, ParamAssignment, Symbol, TheoremId};

fn mono(c: i64, e: i64) -> Monomial { Monomial::new(coeff_int(c), exp_int(e)) }

fn main() {
    for id in [TheoremId::WhippleA, TheoremId::WhippleB, TheoremId::WhippleC, TheoremId::WhippleD] {
        for b in [Monomial::zero(), mono(-1, 0), mono(-1, 1), mono(1, 1)] {
            let p = ParamAssignment::new()
                .with(Symbol::A, Monomial::zero())
                .with(Symbol::B, b.clone());
            match theorem_sides(id, &p, &exp_int(40)) {
                Ok((lhs, rhs)) => match Series::equal_up_to(&lhs, &rhs, &exp_int(40)).unwrap() {
                    None => println!("{id} b={b}: OK"),
                    Some(mm) => println!("{id} b={b}: MISMATCH {mm}"),
                },
                Err(e) => println!("{id} b={b}: ERR {e}"),
            }
        }
    }
}
